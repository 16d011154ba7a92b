//! Exact orthant probabilities for `p ≤ 3`.

use std::f64::consts::PI;

use super::{validate_covariance, OrthantMethod, OrthantResult};
use crate::linalg::RMatrix;
use crate::special::clamped_asin;
use crate::{Error, Result};

/// `P(w ≥ 0)` for `w ~ N(0, cov)`, `p ∈ {1, 2, 3}`.
pub fn orthant_closed(cov: &RMatrix) -> Result<OrthantResult> {
    let p = cov.nrows();
    if p > 3 {
        return Err(Error::UnsupportedDimension(p));
    }
    let corr = validate_covariance(cov)?;
    Ok(OrthantResult::exact(closed_from_correlation(&corr), OrthantMethod::ClosedForm))
}

/// Closed form on a correlation matrix; caller guarantees `p ≤ 3`.
pub(crate) fn closed_from_correlation(corr: &RMatrix) -> f64 {
    match corr.nrows() {
        1 => 0.5,
        2 => 0.25 + clamped_asin(corr[(0, 1)]) / (2.0 * PI),
        3 => {
            let s = clamped_asin(corr[(0, 1)]) + clamped_asin(corr[(0, 2)]) + clamped_asin(corr[(1, 2)]);
            0.125 + s / (4.0 * PI)
        }
        p => unreachable!("closed form called with p = {p}"),
    }
}
