//! Closed form for real equicorrelated channel and noise, any `n`.
//!
//! With `β = (γφ + ξ)/(1 + γ) ≥ 0` the normalized effective covariance is the
//! equicorrelation matrix `(1−β)I + β11ᵀ`, whose orthant probabilities reduce
//! to one-dimensional integrals `E_Z[∏ Q(±aZ)]`. These depend only on how
//! many signs are positive, so every outcome is served from two small tables.

use std::f64::consts::PI;

use super::{check_word_len, simo_constants, simo_prefactor, Diagnostics, EstimateReport, EstimatorMethod};
use crate::model::{CorrelationKind, CovariancePair, OneBitWord, SystemConfig};
use crate::orthant::expectation_q_counts;
use crate::special::clamped_asin;
use crate::{Complex64, Error, Result};

/// Relative accuracy of the table entries.
const TABLE_RELATIVE_ERROR: f64 = 1e-11;

/// `(γφ + ξ)/(1 + γ)`.
pub fn beta_real(gamma: f64, phi: f64, xi: f64) -> f64 {
    (gamma * phi + xi) / (1.0 + gamma)
}

#[derive(Debug, Clone)]
pub struct Prop2Estimator {
    n: usize,
    gamma: f64,
    beta: f64,
    /// `Φ = (1−φ)I + φ11ᵀ`
    phi: f64,
    prefactor: Complex64,
    /// Orthant probability of the `n−1` remaining coordinates given one at
    /// zero, indexed by the number of positive signs among them.
    numerator: Vec<f64>,
    /// `P` of an `n`-coordinate sign pattern, indexed by its positive count.
    denominator: Vec<f64>,
}

impl Prop2Estimator {
    pub fn new(n: usize, gamma: f64, phi: f64, xi: f64, pilot_symbol: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        if !(gamma > 0.0) {
            return Err(Error::domain("gamma", gamma, "gamma > 0"));
        }
        for (name, v) in [("phi", phi), ("xi", xi)] {
            crate::model::build_constant_correlation(CorrelationKind::Real, Complex64::new(v, 0.0), n)
                .map_err(|_| {
                    let (lo, _) = crate::model::real_correlation_bounds(n);
                    Error::domain(name, v, &format!("{lo} < {name} < 1"))
                })?;
        }
        let beta = if n == 1 { 0.0 } else { beta_real(gamma, phi, xi) };
        let (numerator, denominator) = match n {
            1 => (vec![1.0], vec![0.5, 0.5]),
            // the bivariate tables are closed form for either sign of β
            2 => {
                let same = 0.25 + clamped_asin(beta) / (2.0 * PI);
                (vec![0.5, 0.5], vec![same, 0.5 - same, same])
            }
            _ => {
                if beta < 0.0 {
                    return Err(Error::NegativeBeta(beta));
                }
                let a_den = (beta / (1.0 - beta)).sqrt();
                let a_num = beta.sqrt();
                let num = (0..n).map(|p| expectation_q_counts(p, n - 1 - p, a_num)).collect();
                let den = (0..=n).map(|p| expectation_q_counts(p, n - p, a_den)).collect();
                (num, den)
            }
        };
        Ok(Self {
            n,
            gamma,
            beta,
            phi: if n == 1 { 0.0 } else { phi },
            prefactor: simo_prefactor(pilot_symbol, gamma, 4.0),
            numerator,
            denominator,
        })
    }

    pub fn from_config(config: &SystemConfig, cov: &CovariancePair) -> Result<Self> {
        let (gamma, phi, xi, s, kind) = simo_constants(config, cov, "the equicorrelated closed form")?;
        if kind != CorrelationKind::Real {
            return Err(Error::Precondition(
                "the equicorrelated closed form requires real correlation models".into(),
            ));
        }
        Self::new(config.n(), gamma, phi.re, xi.re, s)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `v_k = r_k N_k / P` for one real sign pattern.
    fn part(&self, signs: &[i8]) -> (Vec<f64>, f64) {
        let positives = signs.iter().filter(|s| **s > 0).count();
        let p = self.denominator[positives];
        let v = signs
            .iter()
            .map(|&s| {
                if s > 0 {
                    self.numerator[positives - 1] / p
                } else {
                    -self.numerator[positives] / p
                }
            })
            .collect();
        (v, p)
    }

    fn apply_phi(&self, v: &[Complex64]) -> Vec<Complex64> {
        let sum: Complex64 = v.iter().sum();
        v.iter().map(|x| x * (1.0 - self.phi) + sum * self.phi).collect()
    }

    pub fn outcome_prob(&self, r: &OneBitWord) -> f64 {
        let count = |s: &[i8]| s.iter().filter(|x| **x > 0).count();
        self.denominator[count(r.re_signs())] * self.denominator[count(r.im_signs())]
    }

    pub fn estimate(&self, r: &OneBitWord) -> Result<EstimateReport> {
        check_word_len(r, self.n)?;
        let (vr, pr) = self.part(r.re_signs());
        let (vi, pi) = self.part(r.im_signs());
        let p = pr * pi;
        if p < super::DEGENERATE_PROBABILITY {
            return Err(Error::DegenerateOutcome(p));
        }
        let v: Vec<Complex64> = vr.iter().zip(&vi).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let h: Vec<Complex64> = self.apply_phi(&v).into_iter().map(|x| self.prefactor * x).collect();
        let abs_error = h.iter().map(|x| 2.0 * TABLE_RELATIVE_ERROR * x.norm()).collect();
        Ok(EstimateReport {
            h_hat: h,
            method: EstimatorMethod::Prop2,
            outcome_prob: Some(p),
            abs_error,
            diagnostics: Diagnostics::Beta { beta: self.beta },
        })
    }

    /// Exact normalized MMSE, summing over positive counts instead of all
    /// `4ⁿ` outcomes.
    pub fn mmse_exact(&self) -> f64 {
        let n = self.n;
        let a = 1.0 - self.phi;
        let b = self.phi;
        let mut norm2 = 0.0;
        let mut sum2 = 0.0;
        let mut binom = 1.0;
        for p in 0..=n {
            let den = self.denominator[p];
            let pos = if p > 0 { self.numerator[p - 1] } else { 0.0 };
            let neg = if p < n { self.numerator[p] } else { 0.0 };
            let np = (n - p) as f64;
            let pf = p as f64;
            norm2 += binom * (pf * pos * pos + np * neg * neg) / den;
            let s = pf * pos - np * neg;
            sum2 += binom * s * s / den;
            binom = binom * np / (pf + 1.0);
        }
        let phi_norm2 = 2.0 * (a * a * norm2 + (2.0 * a * b + b * b * n as f64) * sum2);
        let c2 = self.gamma / (4.0 * PI * (1.0 + self.gamma));
        1.0 - c2 * phi_norm2 / n as f64
    }
}

/// One-shot equicorrelated estimator; `config` must be SIMO.
pub fn estimate_prop2(config: &SystemConfig, phi: f64, xi: f64, r: &OneBitWord) -> Result<EstimateReport> {
    if !config.is_simo() {
        return Err(Error::Precondition("the equicorrelated closed form requires m = tau = 1".into()));
    }
    Prop2Estimator::new(config.n(), config.gamma(), phi, xi, config.pilot_symbol())?.estimate(r)
}

pub fn mmse_exact_prop2(n: usize, gamma: f64, phi: f64, xi: f64) -> Result<f64> {
    Ok(Prop2Estimator::new(n, gamma, phi, xi, Complex64::new(1.0, 0.0))?.mmse_exact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::GeneralEstimator;
    use crate::orthant::OrthantOptions;

    #[test]
    fn beta_examples() {
        assert_eq!(beta_real(1.0, 0.5, 0.5), 0.5);
        assert!((beta_real(1.0, 0.5, -0.5)).abs() < 1e-16);
    }

    #[test]
    fn uncorrelated_mmse() {
        let g = 3.0;
        let want = 1.0 - 2.0 * g / (PI * (1.0 + g));
        for n in [1, 2, 3, 6] {
            assert!((mmse_exact_prop2(n, g, 0.0, 0.0).unwrap() - want).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn half_equicorrelation_tables() {
        // β = 1/2: every n-variate orthant is 1/(n+1)
        let e = Prop2Estimator::new(4, 1.0, 0.5, 0.5, Complex64::new(1.0, 0.0)).unwrap();
        assert!((e.denominator[4] - 0.2).abs() < 1e-12);
        assert!((e.denominator[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn negative_beta_rejected_above_two() {
        assert!(matches!(
            Prop2Estimator::new(3, 1.0, 0.0, -0.3, Complex64::new(1.0, 0.0)),
            Err(Error::NegativeBeta(_))
        ));
        assert!(Prop2Estimator::new(2, 1.0, 0.0, -0.6, Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn probabilities_normalize() {
        let e = Prop2Estimator::new(3, 2.0, 0.4, 0.2, Complex64::new(1.0, 0.0)).unwrap();
        let total: f64 = OneBitWord::all(3).map(|r| e.outcome_prob(&r)).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_general_estimator() {
        for (n, phi, xi) in [(3, 0.4, 0.2), (2, 0.3, -0.7), (4, 0.5, 0.1)] {
            let s = Complex64::from_polar(1.0, 0.4);
            let cfg = SystemConfig::simo(n, 2.0, s).unwrap();
            let cov = CovariancePair::constant(&cfg, CorrelationKind::Real, phi.into(), xi.into()).unwrap();
            let closed = Prop2Estimator::from_config(&cfg, &cov).unwrap();
            let general = GeneralEstimator::new(&cfg, &cov, OrthantOptions::with_target(1e-9, 1)).unwrap();
            for key in [0u64, 1, 5, (1 << (2 * n)) - 1] {
                let r = OneBitWord::from_key(key, n);
                let a = closed.estimate(&r).unwrap();
                let b = general.estimate(&r).unwrap();
                assert!((a.outcome_prob.unwrap() - b.outcome_prob.unwrap()).abs() < 1e-9);
                for (x, y) in a.h_hat.iter().zip(&b.h_hat) {
                    assert!((x - y).norm() < 1e-7, "n={n} key={key}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn mmse_matches_outcome_enumeration() {
        let e = Prop2Estimator::new(3, 1.5, 0.3, 0.4, Complex64::new(1.0, 0.0)).unwrap();
        let energy: f64 = OneBitWord::all(3)
            .map(|r| {
                let h = e.estimate(&r).unwrap();
                h.outcome_prob.unwrap() * h.h_hat.iter().map(|x| x.norm_sqr()).sum::<f64>()
            })
            .sum();
        assert!((e.mmse_exact() - (1.0 - energy / 3.0)).abs() < 1e-12);
    }
}
