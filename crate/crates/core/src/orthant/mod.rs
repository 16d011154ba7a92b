//! Multivariate normal orthant probabilities `P(w ≥ 0)`, `w ~ N(0, Ω)`.
//!
//! [`orthant_prob`] standardizes `Ω` to a correlation matrix, splits it into
//! independent blocks and evaluates each block with the cheapest exact
//! backend available: closed forms for `p ≤ 3`, a one-dimensional Plackett
//! reduction for `p = 4` and randomized quasi-Monte Carlo beyond.

mod closed;
mod montecarlo;
mod plackett;
mod qmc;
mod qproduct;

use serde::{Deserialize, Serialize};

pub use closed::orthant_closed;
pub use montecarlo::orthant_mc;
pub use plackett::orthant_quadrature_p4;
pub use qmc::orthant_qmc;
pub use qproduct::{expectation_q_counts, expectation_q_product};

use crate::linalg::{checked_cholesky, spd_inverse, RMatrix};
use crate::{Error, Result};

/// Largest supported orthant dimension.
pub const MAX_DIMENSION: usize = 64;

/// Correlations at or below this magnitude are treated as exact zeros when
/// splitting into independent blocks.
const BLOCK_ZERO: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthantMethod {
    ClosedForm,
    QuadratureP4,
    Qmc,
    McOracle,
}

impl OrthantMethod {
    fn rank(self) -> u8 {
        match self {
            OrthantMethod::ClosedForm => 0,
            OrthantMethod::QuadratureP4 => 1,
            OrthantMethod::Qmc => 2,
            OrthantMethod::McOracle => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthantResult {
    pub value: f64,
    /// Estimated absolute error; zero for closed forms.
    pub abs_error: f64,
    pub method: OrthantMethod,
    /// Set when the sampling budget ran out before reaching the target error.
    pub budget_exceeded: bool,
}

impl OrthantResult {
    pub(crate) fn exact(value: f64, method: OrthantMethod) -> Self {
        Self {
            value,
            abs_error: 0.0,
            method,
            budget_exceeded: false,
        }
    }

    /// Product of independent factors with a first-order-exact error bound.
    fn product(parts: &[OrthantResult]) -> Self {
        let value: f64 = parts.iter().map(|r| r.value).product();
        let upper: f64 = parts.iter().map(|r| r.value + r.abs_error).product();
        let method = parts
            .iter()
            .map(|r| r.method)
            .max_by_key(|m| m.rank())
            .unwrap_or(OrthantMethod::ClosedForm);
        Self {
            value,
            abs_error: (upper - value).max(0.0),
            method,
            budget_exceeded: parts.iter().any(|r| r.budget_exceeded),
        }
    }
}

/// Controls for the stochastic backends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthantOptions {
    /// Stop once the replicate standard error falls below this.
    pub target_abs_error: f64,
    pub seed: u64,
    /// Independent randomizations of the point set.
    pub replicates: usize,
    pub min_points: usize,
    pub max_points_per_replicate: usize,
}

impl Default for OrthantOptions {
    fn default() -> Self {
        Self {
            target_abs_error: 1e-6,
            seed: 0x5eed,
            replicates: 24,
            min_points: 256,
            max_points_per_replicate: 1 << 20,
        }
    }
}

impl OrthantOptions {
    pub fn with_target(target_abs_error: f64, seed: u64) -> Self {
        Self {
            target_abs_error,
            seed,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(1e-10..=1e-2).contains(&self.target_abs_error) {
            return Err(Error::domain(
                "target_abs_error",
                self.target_abs_error,
                "[1e-10, 1e-2]",
            ));
        }
        if self.replicates < 2 {
            return Err(Error::domain("replicates", self.replicates, ">= 2"));
        }
        Ok(())
    }

    fn for_block(&self, block: usize) -> Self {
        Self {
            seed: self
                .seed
                .wrapping_add((block as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            ..*self
        }
    }
}

/// Checks shape, symmetry and positive definiteness, and returns the
/// correlation matrix.
pub(crate) fn validate_covariance(cov: &RMatrix) -> Result<RMatrix> {
    let p = cov.nrows();
    if p == 0 || !cov.is_square() {
        return Err(Error::DimensionMismatch {
            context: "orthant covariance",
            expected: "non-empty square matrix".into(),
            actual: format!("{}x{}", cov.nrows(), cov.ncols()),
        });
    }
    if p > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge(p));
    }
    if cov.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotPositiveDefinite {
            context: "orthant covariance (non-finite entries)".into(),
        });
    }
    let scale = cov.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 0..p {
        for j in 0..i {
            if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::NotHermitian {
                    context: "orthant covariance".into(),
                    asymmetry: (cov[(i, j)] - cov[(j, i)]).abs(),
                });
            }
        }
    }
    checked_cholesky(cov, "orthant covariance")?;
    let sd: Vec<f64> = (0..p).map(|i| cov[(i, i)].sqrt()).collect();
    Ok(RMatrix::from_fn(p, p, |i, j| {
        if i == j {
            1.0
        } else {
            0.5 * (cov[(i, j)] + cov[(j, i)]) / (sd[i] * sd[j])
        }
    }))
}

/// Connected components of the graph of non-negligible correlations.
fn independent_blocks(corr: &RMatrix) -> Vec<Vec<usize>> {
    let p = corr.nrows();
    let mut label = vec![usize::MAX; p];
    let mut blocks = Vec::new();
    for start in 0..p {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for j in 0..p {
                if label[j] == usize::MAX && corr[(i, j)].abs() > BLOCK_ZERO {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

fn sub_matrix(m: &RMatrix, idx: &[usize]) -> RMatrix {
    RMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

fn orthant_block(corr: &RMatrix, options: &OrthantOptions) -> Result<OrthantResult> {
    match corr.nrows() {
        1..=3 => Ok(OrthantResult::exact(
            closed::closed_from_correlation(corr),
            OrthantMethod::ClosedForm,
        )),
        4 => {
            let (value, err) = plackett::plackett4(corr);
            Ok(OrthantResult {
                value: value.clamp(0.0, 1.0),
                abs_error: err,
                method: OrthantMethod::QuadratureP4,
                budget_exceeded: false,
            })
        }
        _ => qmc::qmc_on_correlation(corr, options),
    }
}

/// Orthant probability of `N(0, cov)`; deterministic for a fixed seed.
pub fn orthant_prob(cov: &RMatrix, options: &OrthantOptions) -> Result<OrthantResult> {
    options.validate()?;
    let corr = validate_covariance(cov)?;
    let blocks = independent_blocks(&corr);
    if blocks.len() == 1 {
        return orthant_block(&corr, options);
    }
    // correlation mass ignored by the split, bounded by |∂P/∂ρ| ≤ 1/2
    let mut dropped = 0.0;
    let mut label = vec![0; corr.nrows()];
    for (b, members) in blocks.iter().enumerate() {
        for &i in members {
            label[i] = b;
        }
    }
    for i in 0..corr.nrows() {
        for j in 0..i {
            if label[i] != label[j] {
                dropped += corr[(i, j)].abs();
            }
        }
    }
    let parts = blocks
        .iter()
        .enumerate()
        .map(|(b, members)| orthant_block(&sub_matrix(&corr, members), &options.for_block(b)))
        .collect::<Result<Vec<_>>>()?;
    let mut result = OrthantResult::product(&parts);
    result.abs_error += 0.5 * dropped;
    Ok(result)
}

/// Orthant probability for the distribution whose *precision* matrix is
/// given, i.e. `orthant_prob(precision⁻¹)`.
pub fn orthant_from_precision(precision: &RMatrix, options: &OrthantOptions) -> Result<OrthantResult> {
    let cov = spd_inverse(precision, "orthant precision")?;
    orthant_prob(&cov, options)
}
