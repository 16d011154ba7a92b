//! Monte Carlo evaluation: correlated sampling, MMSE with standard errors, a
//! brute-force conditional-mean oracle and parameter sweeps.
//!
//! Every sampler splits its work into fixed-size chunks, each driven by its
//! own ChaCha stream keyed by the chunk index. Chunk partials are merged in
//! index order, so results for a given seed do not depend on `block_count`
//! or on the number of worker threads.

mod mc;
mod oracle;
mod sampling;
mod sweep;

use serde::{Deserialize, Serialize};

pub use mc::{mc_mmse, mc_mmse_report, McMmseReport};
pub use oracle::{conditional_mean_oracle, OracleBin, ORACLE_MAX_OBSERVATIONS, RELIABLE_BIN_COUNT};
pub use sampling::sample_correlated_gaussian;
pub use sweep::{sweep, Evaluation, SweepAxis, SweepRow, SweepSpec};

use crate::{Error, Result};

/// Samples per chunk; each chunk owns one RNG stream.
pub(crate) const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub sample_count: usize,
    pub seed: u64,
    /// Number of parallel work groups. Only affects scheduling.
    pub block_count: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            sample_count: 1_000_000,
            seed: 0x5eed,
            block_count: 16,
        }
    }
}

impl McConfig {
    pub fn new(sample_count: usize, seed: u64) -> Self {
        Self {
            sample_count,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 1000 {
            return Err(Error::domain("sample_count", self.sample_count, ">= 1000"));
        }
        if self.block_count == 0 {
            return Err(Error::domain("block_count", self.block_count, ">= 1"));
        }
        Ok(())
    }

    pub(crate) fn chunks(&self) -> usize {
        self.sample_count.div_ceil(CHUNK)
    }

    pub(crate) fn chunk_len(&self, chunk: usize) -> usize {
        CHUNK.min(self.sample_count - chunk * CHUNK)
    }

    /// Minimum chunks per rayon task so that roughly `block_count` tasks run.
    pub(crate) fn min_len(&self) -> usize {
        self.chunks().div_ceil(self.block_count).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub sample_count: usize,
}

/// Running mean and sum of squared deviations; merges are order-sensitive
/// only through rounding, and callers merge in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub count: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }

    pub fn result(&self) -> McResult {
        McResult {
            estimate: self.mean,
            std_error: self.std_error(),
            sample_count: self.count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|x| all.push(*x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..313].iter().for_each(|x| a.push(*x));
        xs[313..].iter().for_each(|x| b.push(*x));
        a.merge(&b);
        assert_eq!(a.count, all.count);
        assert!((a.mean - all.mean).abs() < 1e-12);
        assert!((a.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(999, 1).validate().is_err());
        assert!(McConfig::new(1000, 1).validate().is_ok());
        let c = McConfig { block_count: 0, ..McConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn chunking_covers_all_samples() {
        let c = McConfig::new(10_000, 0);
        let total: usize = (0..c.chunks()).map(|k| c.chunk_len(k)).sum();
        assert_eq!(total, 10_000);
    }
}
