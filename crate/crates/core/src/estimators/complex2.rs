//! Closed form for two receive antennas with constant complex correlation.
//!
//! The estimator depends on the noise correlation only through
//! `β_c = (γφ + ξ)/(1 + γ)`. Five arcsine constants and two one-dimensional
//! integrals describe the four-dimensional orthant geometry, so every
//! outcome probability and estimate is available without sampling.

use std::f64::consts::PI;

use serde::Serialize;

use super::{check_word_len, simo_constants, simo_prefactor, Diagnostics, EstimateReport, EstimatorMethod};
use crate::linalg::CMatrix;
use crate::model::{build_constant_correlation, CorrelationKind, CovariancePair, OneBitWord, SystemConfig};
use crate::quadrature::integrate;
use crate::special::clamped_asin;
use crate::{Complex64, Error, Result};

const INTEGRAL_TOLERANCE: f64 = 1e-13;

/// `(γφ + ξ)/(1 + γ)`.
pub fn beta_complex(gamma: f64, phi: Complex64, xi: Complex64) -> Complex64 {
    (phi * gamma + xi) / (1.0 + gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop1Constants {
    pub beta_c: Complex64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
    pub i1: f64,
    pub i2: f64,
    /// Quadrature error bound on `i1` plus that on `i2`.
    pub integral_error: f64,
}

pub fn prop1_constants(beta_c: Complex64) -> Result<Prop1Constants> {
    if !(beta_c.norm() < 1.0) {
        return Err(Error::domain("|beta_c|", beta_c.norm(), "|beta_c| < 1"));
    }
    let (re, im) = (beta_c.re, beta_c.im);
    let mag2 = beta_c.norm_sqr();
    let kappa1 = clamped_asin(re / (1.0 - im * im).sqrt());
    let kappa2 = clamped_asin(im / (1.0 - re * re).sqrt());
    let kappa3 = clamped_asin(kappa1.sin() * kappa2.sin());
    let kappa4 = clamped_asin(re);
    let kappa5 = clamped_asin(im);

    // arcsin √((|β|² cos²θ − b²)/(cos²θ − b²)) over [0, |κ|]
    let integral = |limit: f64, other: f64| {
        let b2 = other * other;
        integrate(
            |theta: f64| {
                let c2 = theta.cos().powi(2);
                let ratio = ((mag2 * c2 - b2) / (c2 - b2)).clamp(0.0, 1.0);
                ratio.sqrt().asin()
            },
            0.0,
            limit.abs(),
            INTEGRAL_TOLERANCE,
        )
    };
    let i1 = integral(kappa4, im);
    let i2 = integral(kappa5, re);
    Ok(Prop1Constants {
        beta_c,
        kappa1,
        kappa2,
        kappa3,
        kappa4,
        kappa5,
        i1: i1.value,
        i2: i2.value,
        integral_error: i1.abs_error + i2.abs_error,
    })
}

/// Prepared two-antenna complex-correlation estimator.
#[derive(Debug, Clone)]
pub struct Prop1Estimator {
    gamma: f64,
    phi_matrix: CMatrix,
    constants: Prop1Constants,
    /// `s*·√(γ/(4π(1+γ)))`
    prefactor: Complex64,
}

impl Prop1Estimator {
    pub fn new(gamma: f64, phi: Complex64, xi: Complex64, pilot_symbol: Complex64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::domain("gamma", gamma, "gamma > 0"));
        }
        let phi_matrix = build_constant_correlation(CorrelationKind::Complex, phi, 2)?;
        build_constant_correlation(CorrelationKind::Complex, xi, 2)?;
        let constants = prop1_constants(beta_complex(gamma, phi, xi))?;
        Ok(Self {
            gamma,
            phi_matrix,
            constants,
            prefactor: simo_prefactor(pilot_symbol, gamma, 4.0),
        })
    }

    pub fn from_config(config: &SystemConfig, cov: &CovariancePair) -> Result<Self> {
        let (gamma, phi, xi, s, _) = simo_constants(config, cov, "the two-antenna closed form")?;
        if config.n() != 2 {
            return Err(Error::Precondition(format!(
                "the two-antenna closed form requires n = 2, got n = {}",
                config.n()
            )));
        }
        Self::new(gamma, phi, xi, s)
    }

    pub fn constants(&self) -> &Prop1Constants {
        &self.constants
    }

    pub fn u(&self, r: &OneBitWord) -> [Complex64; 2] {
        let z = r.to_complex();
        let k = &self.constants;
        let j = Complex64::new(0.0, 1.0);
        let a1 = z[0].re * z[0].im;
        let a2 = z[1].re * z[1].im;
        [
            z[1].conj() * a1 * (j * k.kappa1 - k.kappa2) - z[0].conj() * a2 * k.kappa3,
            z[0].conj() * a2 * (j * k.kappa1 + k.kappa2) + z[1].conj() * a1 * k.kappa3,
        ]
    }

    pub fn outcome_prob(&self, r: &OneBitWord) -> f64 {
        let z = r.to_complex();
        let k = &self.constants;
        let cross = z[0].conj() * z[1];
        1.0 / 16.0
            + k.kappa4 / (8.0 * PI) * cross.re
            + k.kappa5 / (8.0 * PI) * cross.im
            + (k.i1 - k.i2) / (4.0 * PI * PI) * z[0].re * z[1].re * z[0].im * z[1].im
    }

    /// `Φ (r/8 + u/(4π))`.
    fn weighted(&self, r: &OneBitWord) -> [Complex64; 2] {
        let z = r.to_complex();
        let u = self.u(r);
        let w = [z[0] / 8.0 + u[0] / (4.0 * PI), z[1] / 8.0 + u[1] / (4.0 * PI)];
        let f = &self.phi_matrix;
        [
            f[(0, 0)] * w[0] + f[(0, 1)] * w[1],
            f[(1, 0)] * w[0] + f[(1, 1)] * w[1],
        ]
    }

    pub fn estimate(&self, r: &OneBitWord) -> Result<EstimateReport> {
        check_word_len(r, 2)?;
        let p = self.outcome_prob(r);
        if p < super::DEGENERATE_PROBABILITY {
            return Err(Error::DegenerateOutcome(p));
        }
        let w = self.weighted(r);
        let h: Vec<Complex64> = w.iter().map(|x| self.prefactor * x / p).collect();
        // P(r) carries the only non-closed-form terms
        let dp = self.constants.integral_error / (4.0 * PI * PI);
        let abs_error = h.iter().map(|x| x.norm() * dp / (p - dp).max(0.5 * p)).collect();
        Ok(EstimateReport {
            h_hat: h,
            method: EstimatorMethod::Prop1,
            outcome_prob: Some(p),
            abs_error,
            diagnostics: Diagnostics::Prop1 {
                constants: self.constants,
                u: self.u(r),
            },
        })
    }

    /// `1 − γ/(8π(1+γ)) Σ_r ‖Φ(r/8 + u(r)/4π)‖² / P(r)`.
    pub fn mmse_exact(&self) -> f64 {
        let sum: f64 = OneBitWord::all(2)
            .map(|r| {
                let w = self.weighted(&r);
                (w[0].norm_sqr() + w[1].norm_sqr()) / self.outcome_prob(&r)
            })
            .sum();
        1.0 - self.gamma / (8.0 * PI * (1.0 + self.gamma)) * sum
    }
}

/// One-shot two-antenna estimator; `config` must be SIMO with `n = 2`.
pub fn estimate_prop1(
    config: &SystemConfig,
    phi: Complex64,
    xi: Complex64,
    r: &OneBitWord,
) -> Result<EstimateReport> {
    if !config.is_simo() || config.n() != 2 {
        return Err(Error::Precondition("the two-antenna closed form requires SIMO with n = 2".into()));
    }
    Prop1Estimator::new(config.gamma(), phi, xi, config.pilot_symbol())?.estimate(r)
}

pub fn outcome_prob_prop1(gamma: f64, phi: Complex64, xi: Complex64, r: &OneBitWord) -> Result<f64> {
    check_word_len(r, 2)?;
    Ok(Prop1Estimator::new(gamma, phi, xi, Complex64::new(1.0, 0.0))?.outcome_prob(r))
}

pub fn mmse_exact_prop1(gamma: f64, phi: Complex64, xi: Complex64) -> Result<f64> {
    Ok(Prop1Estimator::new(gamma, phi, xi, Complex64::new(1.0, 0.0))?.mmse_exact())
}
