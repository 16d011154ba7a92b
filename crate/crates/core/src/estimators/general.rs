//! The general orthant-probability form of `E[h | r]`.
//!
//! With `x = (Re y, Im y) ~ N(0, B_c)` and `Λ = diag(Re r, Im r)`, Stein's
//! identity gives `E[x 1{Λx ≥ 0}] = B_c v` where `v_k` is `λ_k` times the
//! marginal density of `x_k` at zero times the orthant probability of the
//! remaining coordinates conditioned on `x_k = 0`. The conditional precision
//! is `Λ B_c⁻¹ Λ` with row and column `k` deleted. Mapping back through
//! `E[h | y] = Φ (S* ⊗ I) B⁻¹ y` yields
//!
//! `ĥ = Φ (S* ⊗ I) diag(B)^{-1/2} g / (2√π · P(r))`,
//!
//! `g_k = Re(r_k) P_k + j Im(r_k) P_{k+τn}`, and `P(r)` is the orthant
//! probability of covariance `Λ B_c Λ`.

use std::f64::consts::PI;

use super::{check_word_len, Diagnostics, EstimateReport, EstimatorMethod, GeneralDiagnostics};
use super::DEGENERATE_PROBABILITY;
use crate::linalg::{delete_row_col, sign_conjugate, spd_inverse, CMatrix, CVector, RMatrix};
use crate::model::{build_effective_covariance, CovariancePair, OneBitWord, SystemConfig};
use crate::orthant::{orthant_from_precision, orthant_prob, OrthantOptions};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone)]
pub struct GeneralEstimator {
    /// `Φ (S* ⊗ I) diag(B)^{-1/2} / (2√π)`
    coefficient: CMatrix,
    b_c: RMatrix,
    b_c_inverse: RMatrix,
    options: OrthantOptions,
    observation_len: usize,
}

impl GeneralEstimator {
    pub fn new(config: &SystemConfig, cov: &CovariancePair, options: OrthantOptions) -> Result<Self> {
        let eff = build_effective_covariance(config, cov)?;
        let tn = config.observation_len();
        let inv_sqrt_diag = CMatrix::from_diagonal(&CVector::from_iterator(
            tn,
            eff.diag().iter().map(|d| Complex64::new(1.0 / d.sqrt(), 0.0)),
        ));
        let coefficient = cov.phi() * config.adjoint_measurement_matrix() * inv_sqrt_diag
            * Complex64::new(1.0 / (2.0 * PI.sqrt()), 0.0);
        let b_c_inverse = spd_inverse(&eff.b_c, "real embedding B_c")?;
        Ok(Self {
            coefficient,
            b_c: eff.b_c,
            b_c_inverse,
            options,
            observation_len: tn,
        })
    }

    pub fn estimate(&self, r: &OneBitWord) -> Result<EstimateReport> {
        check_word_len(r, self.observation_len)?;
        let tn = self.observation_len;
        let signs = r.sign_vector();

        let denominator = orthant_prob(&sign_conjugate(&self.b_c, &signs), &self.options)?;
        if denominator.value < DEGENERATE_PROBABILITY {
            return Err(Error::DegenerateOutcome(denominator.value));
        }
        let precision = sign_conjugate(&self.b_c_inverse, &signs);
        let numerators = (0..2 * tn)
            .map(|i| orthant_from_precision(&delete_row_col(&precision, i), &self.options))
            .collect::<Result<Vec<_>>>()?;

        let p = denominator.value;
        let dp = denominator.abs_error;
        let mut ratio = CVector::zeros(tn);
        let mut ratio_error = vec![0.0; tn];
        let mut g = Vec::with_capacity(tn);
        for k in 0..tn {
            let (re, im) = (&numerators[k], &numerators[k + tn]);
            let gk = Complex64::new(signs[k] * re.value, signs[k + tn] * im.value);
            g.push(gk);
            ratio[k] = gk / p;
            // |o/P − õ/P̃| ≤ (δo + (o/P) δP) / (P − δP)
            let denom = (p - dp).max(p * 0.5);
            ratio_error[k] = (re.abs_error + re.value / p * dp) / denom
                + (im.abs_error + im.value / p * dp) / denom;
        }
        let h = &self.coefficient * ratio;
        let abs_error = (0..self.coefficient.nrows())
            .map(|i| {
                (0..tn)
                    .map(|k| self.coefficient[(i, k)].norm() * ratio_error[k])
                    .sum()
            })
            .collect();
        Ok(EstimateReport {
            h_hat: h.iter().copied().collect(),
            method: EstimatorMethod::General,
            outcome_prob: Some(p),
            abs_error,
            diagnostics: Diagnostics::General(GeneralDiagnostics {
                g,
                denominator,
                max_numerator_error: numerators.iter().map(|o| o.abs_error).fold(0.0, f64::max),
            }),
        })
    }
}

/// One-shot general estimator.
pub fn estimate_general(
    config: &SystemConfig,
    cov: &CovariancePair,
    r: &OneBitWord,
    options: &OrthantOptions,
) -> Result<EstimateReport> {
    GeneralEstimator::new(config, cov, *options)?.estimate(r)
}
