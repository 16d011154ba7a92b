//! The arcsine-law linear estimator, exact when every row of `B_c` has at
//! most two non-zero entries.

use std::f64::consts::PI;

use super::{check_word_len, Diagnostics, EstimateReport, EstimatorMethod};
use crate::linalg::{CMatrix, CVector, RMatrix};
use crate::model::{build_effective_covariance, CovariancePair, OneBitWord, SystemConfig};
use crate::special::clamped_asin;
use crate::{Complex64, Error, Result};

/// Entries above this fraction of `max |B_c|` count as non-zero.
pub const LINEARITY_ZERO_THRESHOLD: f64 = 1e-12;

/// True iff every row of `b_c` has at most two non-zero entries.
pub fn check_linearity(b_c: &RMatrix) -> bool {
    let scale = b_c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let threshold = LINEARITY_ZERO_THRESHOLD * scale;
    b_c.row_iter()
        .all(|row| row.iter().filter(|x| x.abs() > threshold).count() <= 2)
}

#[derive(Debug, Clone)]
pub struct LinearEstimator {
    /// `√(π/4) Φ (S* ⊗ I) diag(B)^{-1/2} B_sa⁻¹`
    matrix: CMatrix,
    observation_len: usize,
}

impl LinearEstimator {
    /// `allow_nonlinear` skips the row-count check (the result is then only
    /// the arcsine-law linear approximation).
    pub fn new(config: &SystemConfig, cov: &CovariancePair, allow_nonlinear: bool) -> Result<Self> {
        let eff = build_effective_covariance(config, cov)?;
        if !allow_nonlinear && !check_linearity(&eff.b_c) {
            return Err(Error::Precondition(
                "B_c has a row with more than two non-zero entries; the MMSE estimator is not linear"
                    .into(),
            ));
        }
        let tn = config.observation_len();
        let d: Vec<f64> = eff.diag().iter().map(|x| 1.0 / x.sqrt()).collect();
        let arcsine = CMatrix::from_fn(tn, tn, |i, j| {
            if i == j {
                // the unit diagonal must be exact: arcsin is singular at 1
                return Complex64::new(PI / 2.0, 0.0);
            }
            let z = eff.b[(i, j)] * d[i] * d[j];
            Complex64::new(clamped_asin(z.re), clamped_asin(z.im))
        });
        let arcsine_inv = arcsine.try_inverse().ok_or(Error::Singular("arcsine matrix B_sa"))?;
        if arcsine_inv.iter().any(|z| !z.is_finite()) {
            return Err(Error::Singular("arcsine matrix B_sa"));
        }
        let inv_sqrt_diag =
            CMatrix::from_diagonal(&CVector::from_iterator(tn, d.iter().map(|x| Complex64::new(*x, 0.0))));
        let matrix = cov.phi() * config.adjoint_measurement_matrix() * inv_sqrt_diag * arcsine_inv
            * Complex64::new((PI / 4.0).sqrt(), 0.0);
        Ok(Self {
            matrix,
            observation_len: tn,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn estimate(&self, r: &OneBitWord) -> Result<EstimateReport> {
        check_word_len(r, self.observation_len)?;
        let rv = CVector::from_vec(r.to_complex());
        let h = &self.matrix * rv;
        Ok(EstimateReport {
            h_hat: h.iter().copied().collect(),
            method: EstimatorMethod::Linear,
            outcome_prob: None,
            abs_error: vec![0.0; h.len()],
            diagnostics: Diagnostics::None,
        })
    }
}

/// One-shot linear estimator; `allow_nonlinear` overrides the exactness check.
pub fn estimate_linear(
    config: &SystemConfig,
    cov: &CovariancePair,
    r: &OneBitWord,
    allow_nonlinear: bool,
) -> Result<EstimateReport> {
    LinearEstimator::new(config, cov, allow_nonlinear)?.estimate(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CorrelationKind;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn b_c_for(n: usize, kind: CorrelationKind, phi: Complex64, xi: Complex64, gamma: f64) -> RMatrix {
        let cfg = SystemConfig::simo_unit(n, gamma).unwrap();
        let cov = CovariancePair::constant(&cfg, kind, phi, xi).unwrap();
        build_effective_covariance(&cfg, &cov).unwrap().b_c
    }

    #[test]
    fn diagonal_is_linear() {
        assert!(check_linearity(&RMatrix::identity(6, 6)));
    }

    #[test]
    fn real_two_antenna_is_linear() {
        assert!(check_linearity(&b_c_for(2, CorrelationKind::Real, c(0.6, 0.0), c(-0.3, 0.0), 2.0)));
    }

    #[test]
    fn real_three_antenna_is_not() {
        assert!(!check_linearity(&b_c_for(3, CorrelationKind::Real, c(0.5, 0.0), c(0.5, 0.0), 1.0)));
    }

    #[test]
    fn generic_complex_pair_is_not() {
        assert!(!check_linearity(&b_c_for(2, CorrelationKind::Complex, c(0.3, 0.4), c(0.1, -0.2), 1.0)));
    }

    #[test]
    fn uncorrelated_reduction() {
        let gamma = 2.5;
        let s = Complex64::from_polar(1.0, -1.1);
        let cfg = SystemConfig::simo(3, gamma, s).unwrap();
        let cov = CovariancePair::uncorrelated(&cfg).unwrap();
        let r: OneBitWord = "+1-1j,-1-1j,+1+1j".parse().unwrap();
        let rep = estimate_linear(&cfg, &cov, &r, false).unwrap();
        let k = s.conj() * (gamma / (PI * (1.0 + gamma))).sqrt();
        for (h, z) in rep.h_hat.iter().zip(r.to_complex()) {
            assert!((h - k * z).norm() < 1e-13, "{h} vs {}", k * z);
        }
    }

    #[test]
    fn real_two_antenna_matches_arcsine_form() {
        // γ = 1, φ = ξ = 0.5: β = 0.5, arcsin β = π/6
        let cfg = SystemConfig::simo_unit(2, 1.0).unwrap();
        let cov = CovariancePair::constant(&cfg, CorrelationKind::Real, c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let m = nalgebra::Matrix2::new(1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0).try_inverse().unwrap();
        let phi = nalgebra::Matrix2::new(1.0, 0.5, 0.5, 1.0);
        let op = phi * m * (1.0 / (2.0 * PI)).sqrt();
        for r in OneBitWord::all(2) {
            let rep = estimate_linear(&cfg, &cov, &r, false).unwrap();
            let z = r.to_complex();
            for i in 0..2 {
                let want = z[0] * op[(i, 0)] + z[1] * op[(i, 1)];
                assert!((rep.h_hat[i] - want).norm() < 1e-13, "{} vs {want}", rep.h_hat[i]);
            }
        }
    }

    #[test]
    fn precondition_enforced_unless_overridden() {
        let cfg = SystemConfig::simo_unit(3, 1.0).unwrap();
        let cov = CovariancePair::constant(&cfg, CorrelationKind::Real, c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let r: OneBitWord = "+1+1j,+1+1j,-1+1j".parse().unwrap();
        assert!(matches!(estimate_linear(&cfg, &cov, &r, false), Err(Error::Precondition(_))));
        assert!(estimate_linear(&cfg, &cov, &r, true).is_ok());
    }
}
