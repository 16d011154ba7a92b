//! Minimum mean-square error channel estimation from one-bit quantized MIMO
//! observations when both the channel and the additive noise are spatially
//! correlated.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: system geometry, covariance construction, the effective
//!   receive covariance and its real embedding, and the one-bit quantizer.
//! - [`orthant`]: multivariate normal orthant probabilities (closed forms,
//!   a one-dimensional reduction for four dimensions, randomized quasi-Monte
//!   Carlo in general) and Gaussian expectations of Q-function products.
//! - [`estimators`]: the general orthant-based conditional-mean estimator,
//!   its linear special case, and closed forms for two-antenna complex and
//!   arbitrary-size real equicorrelated SIMO systems.
//! - [`evaluation`]: correlated sampling, Monte Carlo MMSE, a brute-force
//!   conditional-mean oracle and parameter sweeps.
//! - [`validation`]: self-check suites reused by the command-line front end.
//!
//! Everything is linear scale; decibel conversion happens at the edges.

pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod linalg;
pub mod model;
pub mod orthant;
pub mod quadrature;
pub mod special;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Converts an SNR in decibels to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear SNR to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
