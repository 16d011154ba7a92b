//! Monte Carlo MMSE.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::SystemSampler;
use super::{McConfig, McResult, Moments};
use crate::estimators::{EstimatorKind, EstimatorMethod, PreparedEstimator};
use crate::model::{CovariancePair, OneBitWord, SystemConfig};
use crate::orthant::OrthantOptions;
use crate::{Complex64, Result};

/// Outcome alphabets up to `4^8` are always cached.
const CACHE_ALL_BELOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMmseReport {
    /// Mean of `‖h − ĥ‖²/(mn)`.
    pub direct: McResult,
    /// Mean of `(tr Φ − ‖ĥ‖²)/(mn)`; equal in expectation by orthogonality.
    pub energy: McResult,
    pub method: EstimatorMethod,
}

type Cache = RwLock<HashMap<u64, Arc<Vec<Complex64>>>>;

struct Evaluator<'a> {
    estimator: &'a PreparedEstimator,
    cache: Option<Cache>,
}

impl Evaluator<'_> {
    fn estimate(&self, r: &OneBitWord) -> Result<Arc<Vec<Complex64>>> {
        let Some(cache) = &self.cache else {
            return Ok(Arc::new(self.estimator.estimate(r)?.h_hat));
        };
        let key = r.key();
        if let Some(h) = cache.read().expect("cache lock poisoned").get(&key) {
            return Ok(Arc::clone(h));
        }
        // estimates are deterministic in r, so a racing duplicate is harmless
        let h = Arc::new(self.estimator.estimate(r)?.h_hat);
        cache
            .write()
            .expect("cache lock poisoned")
            .insert(key, Arc::clone(&h));
        Ok(h)
    }
}

/// Monte Carlo estimate of the normalized MMSE with its standard error.
pub fn mc_mmse(
    kind: EstimatorKind,
    config: &SystemConfig,
    cov: &CovariancePair,
    mc: &McConfig,
    orthant: &OrthantOptions,
) -> Result<McResult> {
    Ok(mc_mmse_report(kind, config, cov, mc, orthant)?.direct)
}

pub fn mc_mmse_report(
    kind: EstimatorKind,
    config: &SystemConfig,
    cov: &CovariancePair,
    mc: &McConfig,
    orthant: &OrthantOptions,
) -> Result<McMmseReport> {
    mc.validate()?;
    let estimator = PreparedEstimator::new(kind, config, cov, orthant)?;
    let tn = config.observation_len();
    let cached = tn <= CACHE_ALL_BELOW || (estimator.is_expensive() && 2 * tn <= 64);
    let evaluator = Evaluator {
        estimator: &estimator,
        cache: cached.then(|| RwLock::new(HashMap::new())),
    };
    let mn = config.channel_len() as f64;
    let trace: f64 = cov.phi().diagonal().iter().map(|z| z.re).sum();

    let partials: Vec<(Moments, Moments)> = (0..mc.chunks())
        .into_par_iter()
        .with_min_len(mc.min_len())
        .map(|chunk| -> Result<(Moments, Moments)> {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(chunk as u64);
            let mut sampler = SystemSampler::new(config, cov)?;
            let mut h = vec![Complex64::new(0.0, 0.0); config.channel_len()];
            let mut direct = Moments::default();
            let mut energy = Moments::default();
            for _ in 0..mc.chunk_len(chunk) {
                let r = sampler.draw(&mut rng, &mut h);
                let h_hat = evaluator.estimate(&r)?;
                let err: f64 = h.iter().zip(h_hat.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
                let norm: f64 = h_hat.iter().map(|b| b.norm_sqr()).sum();
                direct.push(err / mn);
                energy.push((trace - norm) / mn);
            }
            Ok((direct, energy))
        })
        .collect::<Result<_>>()?;

    let mut direct = Moments::default();
    let mut energy = Moments::default();
    for (d, e) in &partials {
        direct.merge(d);
        energy.merge(e);
    }
    Ok(McMmseReport {
        direct: direct.result(),
        energy: energy.result(),
        method: estimator.method(),
    })
}
