//! Parameter sweeps producing MMSE tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mc::mc_mmse_report;
use super::McConfig;
use crate::estimators::{
    beta_real, mmse_closed_uncorrelated, mmse_exact_prop1, mmse_exact_prop2, special_linear_case,
    EstimatorKind, LinearPointMode,
};
use crate::model::{CorrelationKind, CovariancePair, SystemConfig};
use crate::orthant::OrthantOptions;
use crate::{Complex64, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Closed forms where available, Monte Carlo elsewhere.
    Exact,
    /// Monte Carlo everywhere.
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case")]
pub enum SweepAxis {
    /// Every SNR for every `(φ, ξ)` pair, pair-major.
    Gamma {
        gamma: Vec<f64>,
        pairs: Vec<(Complex64, Complex64)>,
    },
    /// `φ = |φ|e^{jθ}`, `ξ = |ξ|e^{jψ}` over a grid of phases, `θ`-major.
    Phase {
        gamma: f64,
        phi_mag: f64,
        xi_mag: f64,
        phi_args: Vec<f64>,
        xi_args: Vec<f64>,
    },
    /// Real `(φ, ξ)` grid evaluated at the linear point `γ̃ = −ξ/φ`, `φ`-major.
    LinearRegion { phi: Vec<f64>, xi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub n: usize,
    pub kind: CorrelationKind,
    /// Estimator used for Monte Carlo points.
    pub estimator: EstimatorKind,
    pub evaluation: Evaluation,
    pub mc: McConfig,
    pub orthant: OrthantOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// Linear SNR; `None` on a linear-region row without a linear point.
    pub gamma: Option<f64>,
    pub phi: Complex64,
    pub xi: Complex64,
    pub mmse: Option<f64>,
    /// `None` for exact values.
    pub std_error: Option<f64>,
    /// `prop1`, `prop2`, `closed_form`, `mc_<estimator>` or `not_applicable`.
    pub method: String,
    /// Why a point is not applicable.
    pub note: Option<String>,
}

impl SweepRow {
    fn not_applicable(gamma: Option<f64>, phi: Complex64, xi: Complex64, note: String) -> Self {
        Self {
            gamma,
            phi,
            xi,
            mmse: None,
            std_error: None,
            method: "not_applicable".into(),
            note: Some(note),
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.mmse.is_some()
    }
}

fn exact_mmse(spec: &SweepSpec, gamma: f64, phi: Complex64, xi: Complex64) -> Result<Option<(f64, &'static str)>> {
    if phi == Complex64::new(0.0, 0.0) && xi == Complex64::new(0.0, 0.0) {
        return Ok(Some((mmse_closed_uncorrelated(gamma)?, "closed_form")));
    }
    match spec.kind {
        CorrelationKind::Complex if spec.n == 2 => Ok(Some((mmse_exact_prop1(gamma, phi, xi)?, "prop1"))),
        CorrelationKind::Real if spec.n <= 2 || beta_real(gamma, phi.re, xi.re) >= 0.0 => {
            Ok(Some((mmse_exact_prop2(spec.n, gamma, phi.re, xi.re)?, "prop2")))
        }
        _ => Ok(None),
    }
}

fn evaluate_point(spec: &SweepSpec, gamma: f64, phi: Complex64, xi: Complex64) -> Result<SweepRow> {
    if spec.evaluation == Evaluation::Exact {
        if let Some((mmse, method)) = exact_mmse(spec, gamma, phi, xi)? {
            return Ok(SweepRow {
                gamma: Some(gamma),
                phi,
                xi,
                mmse: Some(mmse),
                std_error: None,
                method: method.into(),
                note: None,
            });
        }
    }
    let config = SystemConfig::simo_unit(spec.n, gamma)?;
    let cov = CovariancePair::constant(&config, spec.kind, phi, xi)?;
    let rep = mc_mmse_report(spec.estimator, &config, &cov, &spec.mc, &spec.orthant)?;
    Ok(SweepRow {
        gamma: Some(gamma),
        phi,
        xi,
        mmse: Some(rep.direct.estimate),
        std_error: Some(rep.direct.std_error),
        method: format!("mc_{}", rep.method),
        note: None,
    })
}

fn linear_region_point(spec: &SweepSpec, phi: f64, xi: f64) -> SweepRow {
    let (p, x) = (Complex64::new(phi, 0.0), Complex64::new(xi, 0.0));
    let case = match special_linear_case(p, x, LinearPointMode::Real, spec.n) {
        Ok(c) => c,
        Err(e) => return SweepRow::not_applicable(None, p, x, e.to_string()),
    };
    if spec.evaluation == Evaluation::Exact {
        return SweepRow {
            gamma: Some(case.gamma_star),
            phi: p,
            xi: x,
            mmse: Some(case.mmse_closed),
            std_error: None,
            method: "closed_form".into(),
            note: None,
        };
    }
    evaluate_point(spec, case.gamma_star, p, x)
        .unwrap_or_else(|e| SweepRow::not_applicable(Some(case.gamma_star), p, x, e.to_string()))
}

/// One row per grid point, in grid order. Points where the model or the
/// estimator is undefined become `not_applicable` rows.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.mc.validate()?;
    let rows = match &spec.axis {
        SweepAxis::Gamma { gamma, pairs } => {
            let points: Vec<(f64, Complex64, Complex64)> = pairs
                .iter()
                .flat_map(|(p, x)| gamma.iter().map(move |g| (*g, *p, *x)))
                .collect();
            points
                .par_iter()
                .map(|&(g, p, x)| {
                    evaluate_point(spec, g, p, x)
                        .unwrap_or_else(|e| SweepRow::not_applicable(Some(g), p, x, e.to_string()))
                })
                .collect()
        }
        SweepAxis::Phase {
            gamma,
            phi_mag,
            xi_mag,
            phi_args,
            xi_args,
        } => {
            let points: Vec<(Complex64, Complex64)> = phi_args
                .iter()
                .flat_map(|t| {
                    xi_args
                        .iter()
                        .map(move |s| (Complex64::from_polar(*phi_mag, *t), Complex64::from_polar(*xi_mag, *s)))
                })
                .collect();
            points
                .par_iter()
                .map(|&(p, x)| {
                    evaluate_point(spec, *gamma, p, x)
                        .unwrap_or_else(|e| SweepRow::not_applicable(Some(*gamma), p, x, e.to_string()))
                })
                .collect()
        }
        SweepAxis::LinearRegion { phi, xi } => {
            let points: Vec<(f64, f64)> = phi.iter().flat_map(|p| xi.iter().map(move |x| (*p, *x))).collect();
            points
                .par_iter()
                .map(|&(p, x)| linear_region_point(spec, p, x))
                .collect()
        }
    };
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(axis: SweepAxis, n: usize, kind: CorrelationKind) -> SweepSpec {
        SweepSpec {
            axis,
            n,
            kind,
            estimator: EstimatorKind::Auto,
            evaluation: Evaluation::Exact,
            mc: McConfig::new(20_000, 1),
            orthant: OrthantOptions::default(),
        }
    }

    #[test]
    fn linear_region_marks_same_signs() {
        let s = spec(
            SweepAxis::LinearRegion {
                phi: vec![0.5, -0.2],
                xi: vec![-0.25, 0.25],
            },
            4,
            CorrelationKind::Real,
        );
        let rows = sweep(&s).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].is_applicable());
        assert!((rows[0].mmse.unwrap() - (1.0 - 1.75 / (1.5 * std::f64::consts::PI))).abs() < 1e-15);
        assert!(!rows[1].is_applicable());
        assert!(!rows[2].is_applicable());
        assert!(rows[3].is_applicable());
        assert_eq!(rows[1].method, "not_applicable");
    }

    #[test]
    fn gamma_axis_orders_rows_pair_major() {
        let s = spec(
            SweepAxis::Gamma {
                gamma: vec![0.1, 1.0, 10.0],
                pairs: vec![
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
                    (Complex64::from_polar(0.9, -0.5), Complex64::from_polar(0.8, -1.0)),
                ],
            },
            2,
            CorrelationKind::Complex,
        );
        let rows = sweep(&s).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].method, "closed_form");
        assert_eq!(rows[4].method, "prop1");
        assert_eq!(rows[4].gamma, Some(1.0));
    }

    #[test]
    fn invalid_points_become_rows() {
        let s = spec(
            SweepAxis::Gamma {
                gamma: vec![1.0],
                pairs: vec![(Complex64::new(1.2, 0.0), Complex64::new(0.0, 0.0))],
            },
            2,
            CorrelationKind::Complex,
        );
        let rows = sweep(&s).unwrap();
        assert_eq!(rows[0].method, "not_applicable");
        assert!(rows[0].note.is_some());
    }

    #[test]
    fn falls_back_to_monte_carlo() {
        let s = spec(
            SweepAxis::Gamma {
                gamma: vec![1.0],
                pairs: vec![(Complex64::new(0.3, 0.0), Complex64::new(-0.4, 0.0))],
            },
            3,
            CorrelationKind::Real,
        );
        let rows = sweep(&s).unwrap();
        assert!(rows[0].method.starts_with("mc_"), "{:?}", rows[0]);
        assert!(rows[0].std_error.unwrap() > 0.0);
    }
}
