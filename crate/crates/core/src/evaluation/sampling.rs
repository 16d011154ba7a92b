//! Circularly symmetric complex Gaussian draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{checked_cholesky, ensure_hermitian, CMatrix};
use crate::model::{quantize_one_bit, CovariancePair, OneBitWord, SystemConfig};
use crate::{Complex64, Result};

/// `count` columns of `CN(0, cov)` draws, colored by the Cholesky factor.
pub fn sample_correlated_gaussian(cov: &CMatrix, count: usize, seed: u64) -> Result<CMatrix> {
    ensure_hermitian(cov, "sampling covariance")?;
    let l = checked_cholesky(cov, "sampling covariance")?.l();
    let dim = cov.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut white = CMatrix::zeros(dim, count);
    for z in white.iter_mut() {
        *z = standard_complex(&mut rng);
    }
    Ok(l * white)
}

pub(crate) fn standard_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws `(h, r)` pairs for a system, reusing buffers.
pub(crate) struct SystemSampler {
    channel_len: usize,
    observation_len: usize,
    /// Row-major lower Cholesky factors and measurement matrix.
    l_phi: Vec<Complex64>,
    l_xi: Vec<Complex64>,
    measurement: Vec<Complex64>,
    white: Vec<Complex64>,
    noise: Vec<Complex64>,
    y: Vec<Complex64>,
}

fn row_major(m: &CMatrix) -> Vec<Complex64> {
    m.transpose().iter().copied().collect()
}

impl SystemSampler {
    pub fn new(config: &SystemConfig, cov: &CovariancePair) -> Result<Self> {
        let l_phi = checked_cholesky(cov.phi(), "channel covariance Phi")?.l();
        let l_xi = checked_cholesky(cov.xi(), "noise covariance Xi")?.l();
        let mn = config.channel_len();
        let tn = config.observation_len();
        Ok(Self {
            channel_len: mn,
            observation_len: tn,
            l_phi: row_major(&l_phi),
            l_xi: row_major(&l_xi),
            measurement: row_major(&config.measurement_matrix()),
            white: vec![Complex64::new(0.0, 0.0); mn.max(tn)],
            noise: vec![Complex64::new(0.0, 0.0); tn],
            y: vec![Complex64::new(0.0, 0.0); tn],
        })
    }

    fn color(l: &[Complex64], white: &[Complex64], out: &mut [Complex64]) {
        let d = out.len();
        for i in 0..d {
            let row = &l[i * d..i * d + i + 1];
            out[i] = row.iter().zip(&white[..=i]).map(|(a, b)| a * b).sum();
        }
    }

    /// Fills `h` with a channel draw and returns the quantized observation.
    pub fn draw(&mut self, rng: &mut ChaCha8Rng, h: &mut [Complex64]) -> OneBitWord {
        let (mn, tn) = (self.channel_len, self.observation_len);
        for z in self.white[..mn].iter_mut() {
            *z = standard_complex(rng);
        }
        Self::color(&self.l_phi, &self.white[..mn], h);
        for i in 0..tn {
            let row = &self.measurement[i * mn..(i + 1) * mn];
            self.y[i] = row.iter().zip(h.iter()).map(|(a, b)| a * b).sum();
        }
        for z in self.white[..tn].iter_mut() {
            *z = standard_complex(rng);
        }
        Self::color(&self.l_xi, &self.white[..tn], &mut self.noise);
        for (y, e) in self.y.iter_mut().zip(&self.noise) {
            *y += e;
        }
        quantize_one_bit(&self.y)
    }
}
