//! Four-dimensional orthant probabilities by Plackett's reduction.
//!
//! Along the path `R(t) = (1 − t) I + t R`, the derivative of the orthant
//! probability with respect to `ρ_ij` is the bivariate density at the origin
//! times the orthant probability of the remaining pair conditioned on
//! `w_i = w_j = 0`. For `p = 4` the conditional is bivariate, so
//!
//! `P(R) = 1/16 + ∫₀¹ Σ_{i<j} ρ_ij φ₂(0, 0; tρ_ij) P₂(cond_ij(t)) dt`
//!
//! with every term in closed form. The integrand is analytic on `[0, 1]`
//! whenever `R` is positive definite.

use std::f64::consts::PI;

use super::{validate_covariance, OrthantMethod, OrthantResult};
use crate::linalg::RMatrix;
use crate::quadrature::integrate;
use crate::special::clamped_asin;
use crate::{Error, Result};

const PAIRS: [(usize, usize, usize, usize); 6] = [
    (0, 1, 2, 3),
    (0, 2, 1, 3),
    (0, 3, 1, 2),
    (1, 2, 0, 3),
    (1, 3, 0, 2),
    (2, 3, 0, 1),
];

pub fn orthant_quadrature_p4(cov: &RMatrix) -> Result<OrthantResult> {
    if cov.nrows() != 4 {
        return Err(Error::DimensionMismatch {
            context: "four-dimensional orthant",
            expected: "4x4".into(),
            actual: format!("{}x{}", cov.nrows(), cov.ncols()),
        });
    }
    let corr = validate_covariance(cov)?;
    let (value, err) = plackett4(&corr);
    Ok(OrthantResult {
        value: value.clamp(0.0, 1.0),
        abs_error: err,
        method: OrthantMethod::QuadratureP4,
        budget_exceeded: false,
    })
}

pub(crate) fn plackett4(corr: &RMatrix) -> (f64, f64) {
    let rate = |t: f64| -> f64 {
        let r = |a: usize, b: usize| if a == b { 1.0 } else { t * corr[(a, b)] };
        let mut total = 0.0;
        for &(i, j, k, l) in &PAIRS {
            let rho = corr[(i, j)];
            if rho == 0.0 {
                continue;
            }
            let rij = t * rho;
            let det = 1.0 - rij * rij;
            // Schur complement of the (i, j) block
            let cond = |x: usize, y: usize| {
                let (xi, xj, yi, yj) = (r(x, i), r(x, j), r(y, i), r(y, j));
                r(x, y) - (xi * yi - rij * (xi * yj + xj * yi) + xj * yj) / det
            };
            let ckk = cond(k, k);
            let cll = cond(l, l);
            let ckl = cond(k, l);
            let p2 = 0.25 + clamped_asin(ckl / (ckk * cll).sqrt()) / (2.0 * PI);
            total += rho / (2.0 * PI * det.sqrt()) * p2;
        }
        total
    };
    let q = integrate(rate, 0.0, 1.0, 1e-15);
    (1.0 / 16.0 + q.value, q.abs_error)
}
