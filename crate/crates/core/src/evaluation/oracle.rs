//! Brute-force `E[h | r]` by binning samples on the observed outcome.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::SystemSampler;
use super::McConfig;
use crate::model::{CovariancePair, OneBitWord, SystemConfig};
use crate::{Complex64, Error, Result};

/// Largest `τn` the oracle accepts (`4^6` bins).
pub const ORACLE_MAX_OBSERVATIONS: usize = 6;
/// Bins with fewer samples are flagged unreliable.
pub const RELIABLE_BIN_COUNT: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleBin {
    pub word: OneBitWord,
    pub count: usize,
    /// Fraction of all samples that fell in this bin.
    pub frequency: f64,
    /// Per-coordinate sample mean of `h`; empty for an empty bin.
    pub mean: Vec<Complex64>,
    /// Standard errors of the real and imaginary parts of `mean`.
    pub std_error_re: Vec<f64>,
    pub std_error_im: Vec<f64>,
    pub reliable: bool,
}

#[derive(Debug, Clone)]
struct BinSums {
    count: usize,
    sum: Vec<Complex64>,
    sum_sq_re: Vec<f64>,
    sum_sq_im: Vec<f64>,
}

impl BinSums {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            sum: vec![Complex64::new(0.0, 0.0); len],
            sum_sq_re: vec![0.0; len],
            sum_sq_im: vec![0.0; len],
        }
    }

    fn push(&mut self, h: &[Complex64]) {
        self.count += 1;
        for (k, z) in h.iter().enumerate() {
            self.sum[k] += z;
            self.sum_sq_re[k] += z.re * z.re;
            self.sum_sq_im[k] += z.im * z.im;
        }
    }

    fn merge(&mut self, other: &BinSums) {
        self.count += other.count;
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sum_sq_re[k] += other.sum_sq_re[k];
            self.sum_sq_im[k] += other.sum_sq_im[k];
        }
    }
}

fn std_error(sum: f64, sum_sq: f64, count: usize) -> f64 {
    if count < 2 {
        return f64::INFINITY;
    }
    let n = count as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (var / n).sqrt()
}

/// One entry per outcome in key order, including empty bins.
pub fn conditional_mean_oracle(
    config: &SystemConfig,
    cov: &CovariancePair,
    mc: &McConfig,
) -> Result<Vec<OracleBin>> {
    mc.validate()?;
    let tn = config.observation_len();
    if tn > ORACLE_MAX_OBSERVATIONS {
        return Err(Error::DimensionTooLarge(tn));
    }
    let mn = config.channel_len();
    let partials: Vec<BTreeMap<u64, BinSums>> = (0..mc.chunks())
        .into_par_iter()
        .with_min_len(mc.min_len())
        .map(|chunk| -> Result<BTreeMap<u64, BinSums>> {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(chunk as u64);
            let mut sampler = SystemSampler::new(config, cov)?;
            let mut h = vec![Complex64::new(0.0, 0.0); mn];
            let mut bins = BTreeMap::new();
            for _ in 0..mc.chunk_len(chunk) {
                let r = sampler.draw(&mut rng, &mut h);
                bins.entry(r.key()).or_insert_with(|| BinSums::new(mn)).push(&h);
            }
            Ok(bins)
        })
        .collect::<Result<_>>()?;

    let mut total: BTreeMap<u64, BinSums> = BTreeMap::new();
    for part in &partials {
        for (key, sums) in part {
            total.entry(*key).or_insert_with(|| BinSums::new(mn)).merge(sums);
        }
    }
    let n = mc.sample_count as f64;
    Ok((0..1u64 << (2 * tn))
        .map(|key| {
            let word = OneBitWord::from_key(key, tn);
            match total.get(&key) {
                Some(b) => {
                    let c = b.count as f64;
                    OracleBin {
                        word,
                        count: b.count,
                        frequency: c / n,
                        mean: b.sum.iter().map(|s| s / c).collect(),
                        std_error_re: (0..mn).map(|k| std_error(b.sum[k].re, b.sum_sq_re[k], b.count)).collect(),
                        std_error_im: (0..mn).map(|k| std_error(b.sum[k].im, b.sum_sq_im[k], b.count)).collect(),
                        reliable: b.count >= RELIABLE_BIN_COUNT,
                    }
                }
                None => OracleBin {
                    word,
                    count: 0,
                    frequency: 0.0,
                    mean: Vec::new(),
                    std_error_re: Vec::new(),
                    std_error_im: Vec::new(),
                    reliable: false,
                },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_cover_every_outcome() {
        let cfg = SystemConfig::simo_unit(2, 1.0).unwrap();
        let cov = CovariancePair::uncorrelated(&cfg).unwrap();
        let bins = conditional_mean_oracle(&cfg, &cov, &McConfig::new(50_000, 1)).unwrap();
        assert_eq!(bins.len(), 16);
        assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 50_000);
        assert!(bins.iter().all(|b| b.reliable));
    }

    #[test]
    fn rejects_large_observation() {
        let cfg = SystemConfig::simo_unit(7, 1.0).unwrap();
        let cov = CovariancePair::uncorrelated(&cfg).unwrap();
        assert!(matches!(
            conditional_mean_oracle(&cfg, &cov, &McConfig::new(1000, 1)),
            Err(Error::DimensionTooLarge(7))
        ));
    }

    #[test]
    fn sparse_bins_are_flagged() {
        let cfg = SystemConfig::simo_unit(3, 1.0).unwrap();
        let cov = CovariancePair::uncorrelated(&cfg).unwrap();
        let bins = conditional_mean_oracle(&cfg, &cov, &McConfig::new(2000, 4)).unwrap();
        assert_eq!(bins.len(), 64);
        assert!(bins.iter().any(|b| !b.reliable));
        assert!(bins.iter().filter(|b| b.count < RELIABLE_BIN_COUNT).all(|b| !b.reliable));
    }
}
