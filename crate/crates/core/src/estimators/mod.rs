//! Conditional-mean channel estimators `E[h | r]`.
//!
//! Every estimator comes in two shapes: a prepared struct that precomputes
//! everything that does not depend on the observation (used by the Monte
//! Carlo machinery, which evaluates thousands of outcomes), and a free
//! function that prepares and evaluates in one call.

mod complex2;
mod general;
mod linear;
mod real_equi;
mod special;

use serde::Serialize;

pub use complex2::{
    beta_complex, estimate_prop1, mmse_exact_prop1, outcome_prob_prop1, prop1_constants,
    Prop1Constants, Prop1Estimator,
};
pub use general::{estimate_general, GeneralEstimator};
pub use linear::{check_linearity, estimate_linear, LinearEstimator};
pub use real_equi::{beta_real, estimate_prop2, mmse_exact_prop2, Prop2Estimator};
pub use special::{
    mmse_closed_uncorrelated, special_linear_case, LinearPointMode, SpecialLinearCase,
};

use crate::model::{
    build_effective_covariance, CorrelationKind, CovariancePair, OneBitWord, SystemConfig,
};
use crate::orthant::{OrthantOptions, OrthantResult};
use crate::{Complex64, Error, Result};

/// Outcome probabilities below this are treated as degenerate.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMethod {
    General,
    Linear,
    Prop1,
    Prop2,
    SpecialLinear,
}

impl std::fmt::Display for EstimatorMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimatorMethod::General => "general",
            EstimatorMethod::Linear => "linear",
            EstimatorMethod::Prop1 => "prop1",
            EstimatorMethod::Prop2 => "prop2",
            EstimatorMethod::SpecialLinear => "special_linear",
        })
    }
}

/// Per-outcome intermediates of the general estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralDiagnostics {
    pub g: Vec<Complex64>,
    pub denominator: OrthantResult,
    /// Largest error among the numerator orthants.
    pub max_numerator_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostics {
    None,
    General(GeneralDiagnostics),
    Prop1 {
        constants: Prop1Constants,
        u: [Complex64; 2],
    },
    Beta {
        beta: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub h_hat: Vec<Complex64>,
    pub method: EstimatorMethod,
    /// `P(r)` when the estimator computes it.
    pub outcome_prob: Option<f64>,
    /// Per-coordinate bound on the numerical error of `h_hat` (modulus).
    pub abs_error: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl EstimateReport {
    pub fn max_abs_error(&self) -> f64 {
        self.abs_error.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Auto,
    General,
    Linear,
    Prop1,
    Prop2,
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(EstimatorKind::Auto),
            "general" => Ok(EstimatorKind::General),
            "linear" => Ok(EstimatorKind::Linear),
            "prop1" => Ok(EstimatorKind::Prop1),
            "prop2" => Ok(EstimatorKind::Prop2),
            other => Err(Error::domain(
                "estimator",
                other,
                "one of auto, general, linear, prop1, prop2",
            )),
        }
    }
}

/// An estimator with all observation-independent work done.
#[derive(Debug, Clone)]
pub enum PreparedEstimator {
    General(GeneralEstimator),
    Linear(LinearEstimator),
    Prop1(Prop1Estimator),
    Prop2(Prop2Estimator),
}

impl PreparedEstimator {
    pub fn new(
        kind: EstimatorKind,
        config: &SystemConfig,
        cov: &CovariancePair,
        options: &OrthantOptions,
    ) -> Result<Self> {
        Ok(match kind {
            EstimatorKind::General => {
                PreparedEstimator::General(GeneralEstimator::new(config, cov, *options)?)
            }
            EstimatorKind::Linear => PreparedEstimator::Linear(LinearEstimator::new(config, cov, false)?),
            EstimatorKind::Prop1 => PreparedEstimator::Prop1(Prop1Estimator::from_config(config, cov)?),
            EstimatorKind::Prop2 => PreparedEstimator::Prop2(Prop2Estimator::from_config(config, cov)?),
            EstimatorKind::Auto => Self::auto(config, cov, options)?,
        })
    }

    /// Picks the cheapest exact estimator for the configuration: the n = 2
    /// complex closed form, then the real equicorrelated closed form (β ≥ 0),
    /// then the linear form when it is exact, else the general estimator.
    fn auto(config: &SystemConfig, cov: &CovariancePair, options: &OrthantOptions) -> Result<Self> {
        if config.is_simo() {
            if let Some((kind, phi, xi)) = cov.constant_parameters() {
                if config.n() == 2 {
                    return Ok(PreparedEstimator::Prop1(Prop1Estimator::from_config(config, cov)?));
                }
                if kind == CorrelationKind::Real
                    && beta_real(config.gamma(), phi.re, xi.re) >= 0.0
                {
                    return Ok(PreparedEstimator::Prop2(Prop2Estimator::from_config(config, cov)?));
                }
            }
        }
        let eff = build_effective_covariance(config, cov)?;
        if check_linearity(&eff.b_c) {
            return Ok(PreparedEstimator::Linear(LinearEstimator::new(config, cov, false)?));
        }
        Ok(PreparedEstimator::General(GeneralEstimator::new(config, cov, *options)?))
    }

    pub fn estimate(&self, r: &OneBitWord) -> Result<EstimateReport> {
        match self {
            PreparedEstimator::General(e) => e.estimate(r),
            PreparedEstimator::Linear(e) => e.estimate(r),
            PreparedEstimator::Prop1(e) => e.estimate(r),
            PreparedEstimator::Prop2(e) => e.estimate(r),
        }
    }

    pub fn method(&self) -> EstimatorMethod {
        match self {
            PreparedEstimator::General(_) => EstimatorMethod::General,
            PreparedEstimator::Linear(_) => EstimatorMethod::Linear,
            PreparedEstimator::Prop1(_) => EstimatorMethod::Prop1,
            PreparedEstimator::Prop2(_) => EstimatorMethod::Prop2,
        }
    }

    /// Cost hint for outcome caching in Monte Carlo runs.
    pub fn is_expensive(&self) -> bool {
        matches!(self, PreparedEstimator::General(_))
    }
}

/// SIMO constant-model parameters `(γ, φ, ξ, s)` or a precondition error.
pub(crate) fn simo_constants(
    config: &SystemConfig,
    cov: &CovariancePair,
    what: &str,
) -> Result<(f64, Complex64, Complex64, Complex64, CorrelationKind)> {
    if !config.is_simo() {
        return Err(Error::Precondition(format!("{what} requires m = tau = 1")));
    }
    let (kind, phi, xi) = cov.constant_parameters().ok_or_else(|| {
        Error::Precondition(format!("{what} requires constant correlation models"))
    })?;
    Ok((config.gamma(), phi, xi, config.pilot_symbol(), kind))
}

/// `s*·√(γ/(c·π(1+γ)))`, the common SIMO prefactor.
pub(crate) fn simo_prefactor(s: Complex64, gamma: f64, c: f64) -> Complex64 {
    s.conj() * (gamma / (c * std::f64::consts::PI * (1.0 + gamma))).sqrt()
}

pub(crate) fn check_word_len(r: &OneBitWord, len: usize) -> Result<()> {
    if r.len() != len {
        return Err(Error::DimensionMismatch {
            context: "observation word",
            expected: len.to_string(),
            actual: r.len().to_string(),
        });
    }
    Ok(())
}
