//! Plain Monte Carlo counting; an oracle for the deterministic backends.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{OrthantMethod, OrthantResult};
use crate::linalg::{checked_cholesky, RMatrix};
use crate::Result;

const CHUNK: usize = 1 << 16;

/// Fraction of `samples` draws of `N(0, cov)` landing in the positive orthant,
/// with the binomial standard error as `abs_error`.
pub fn orthant_mc(cov: &RMatrix, samples: usize, seed: u64) -> Result<OrthantResult> {
    let l = checked_cholesky(cov, "orthant covariance")?.l();
    let p = cov.nrows();
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut z = vec![0.0; p];
            let mut hits = 0u64;
            for _ in 0..count {
                for v in z.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let inside = (0..p).all(|i| (0..=i).map(|k| l[(i, k)] * z[k]).sum::<f64>() >= 0.0);
                hits += inside as u64;
            }
            hits
        })
        .sum();
    let value = hits as f64 / samples as f64;
    Ok(OrthantResult {
        value,
        abs_error: (value * (1.0 - value) / samples as f64).sqrt(),
        method: OrthantMethod::McOracle,
        budget_exceeded: false,
    })
}
