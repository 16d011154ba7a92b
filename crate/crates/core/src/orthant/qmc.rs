//! Randomized quasi-Monte-Carlo orthant probabilities.
//!
//! Separation of variables on a pivoted Cholesky factor turns `P(w ≥ 0)` into
//! an integral over the unit cube of dimension `p − 1`. The cube is sampled
//! with a randomly shifted Richtmyer (Kronecker) sequence, tent-transformed and
//! antithetic; `R` independent shifts give the error estimate. Variables are
//! ordered greedily so that the most constrained ones come first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{validate_covariance, OrthantMethod, OrthantOptions, OrthantResult};
use crate::linalg::RMatrix;
use crate::special::{fast_normal_quantile, gaussian_q, truncated_mean_above};
use crate::{Error, Result};

const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311,
];

pub fn orthant_qmc(cov: &RMatrix, options: &OrthantOptions) -> Result<OrthantResult> {
    options.validate()?;
    let corr = validate_covariance(cov)?;
    qmc_on_correlation(&corr, options)
}

pub(crate) fn qmc_on_correlation(corr: &RMatrix, options: &OrthantOptions) -> Result<OrthantResult> {
    let p = corr.nrows();
    if p == 1 {
        return Ok(OrthantResult::exact(0.5, OrthantMethod::Qmc));
    }
    let factor = ordered_cholesky(corr)?;
    let dims = p - 1;
    let alpha: Vec<f64> = PRIMES[..dims].iter().map(|q| (*q as f64).sqrt().fract()).collect();
    let replicates = options.replicates.max(2);
    let shifts: Vec<Vec<f64>> = (0..replicates)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(r as u64);
            (0..dims).map(|_| rng.random::<f64>()).collect()
        })
        .collect();

    let mut sums = vec![0.0; replicates];
    let mut done = 0usize;
    let mut target = options.min_points.max(16);
    let max_points = options.max_points_per_replicate.max(target);
    loop {
        let partial: Vec<f64> = shifts
            .par_iter()
            .map(|shift| {
                let mut x = vec![0.0; dims];
                let mut scratch = vec![0.0; p];
                let mut acc = 0.0;
                for idx in (done + 1)..=target {
                    for j in 0..dims {
                        let u = (idx as f64 * alpha[j] + shift[j]).fract();
                        x[j] = 1.0 - (2.0 * u - 1.0).abs();
                    }
                    let f1 = factor.integrand(&x, &mut scratch);
                    for v in x.iter_mut() {
                        *v = 1.0 - *v;
                    }
                    let f2 = factor.integrand(&x, &mut scratch);
                    acc += 0.5 * (f1 + f2);
                }
                acc
            })
            .collect();
        for (s, add) in sums.iter_mut().zip(&partial) {
            *s += add;
        }
        done = target;
        let estimates: Vec<f64> = sums.iter().map(|s| s / done as f64).collect();
        let mean = estimates.iter().sum::<f64>() / replicates as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (replicates - 1) as f64;
        let se = (var / replicates as f64).sqrt();
        let converged = se <= options.target_abs_error;
        if converged || target.saturating_mul(2) > max_points {
            return Ok(OrthantResult {
                value: mean.clamp(0.0, 1.0),
                abs_error: se,
                method: OrthantMethod::Qmc,
                budget_exceeded: !converged,
            });
        }
        target *= 2;
    }
}

/// Lower Cholesky factor of a variable-reordered correlation matrix.
struct OrderedFactor {
    p: usize,
    l: RMatrix,
}

impl OrderedFactor {
    /// Conditional probability product for one point of the unit cube.
    fn integrand(&self, u: &[f64], z: &mut [f64]) -> f64 {
        // first lower limit is 0 / l_00 = 0
        let mut prod = 0.5;
        let mut tail = 0.5;
        for i in 0..self.p {
            if i > 0 {
                let mut s = 0.0;
                for k in 0..i {
                    s += self.l[(i, k)] * z[k];
                }
                let a = -s / self.l[(i, i)];
                tail = gaussian_q(a);
                prod *= tail;
                if prod == 0.0 {
                    return 0.0;
                }
            }
            if i + 1 < self.p {
                // draw z_i > a_i: Q(z_i) = u · Q(a_i)
                let v = (u[i] * tail).max(f64::MIN_POSITIVE);
                z[i] = -fast_normal_quantile(v);
            }
        }
        prod
    }
}

fn ordered_cholesky(corr: &RMatrix) -> Result<OrderedFactor> {
    let p = corr.nrows();
    let mut c = corr.clone();
    let mut l = RMatrix::zeros(p, p);
    let mut y = vec![0.0; p];
    for i in 0..p {
        // choose the remaining variable with the smallest conditional
        // probability given expected values of those already placed
        let mut best = i;
        let mut best_prob = f64::INFINITY;
        for j in i..p {
            let mut var = c[(j, j)];
            let mut mean = 0.0;
            for k in 0..i {
                var -= l[(j, k)] * l[(j, k)];
                mean += l[(j, k)] * y[k];
            }
            if var <= 0.0 {
                continue;
            }
            let prob = gaussian_q(-mean / var.sqrt());
            if prob < best_prob {
                best_prob = prob;
                best = j;
            }
        }
        if best != i {
            c.swap_rows(i, best);
            c.swap_columns(i, best);
            l.swap_rows(i, best);
        }
        let mut diag = c[(i, i)];
        for k in 0..i {
            diag -= l[(i, k)] * l[(i, k)];
        }
        if !(diag > 1e-12) {
            return Err(Error::NotPositiveDefinite {
                context: "orthant covariance".into(),
            });
        }
        let lii = diag.sqrt();
        l[(i, i)] = lii;
        for r in (i + 1)..p {
            let mut s = c[(r, i)];
            for k in 0..i {
                s -= l[(r, k)] * l[(i, k)];
            }
            l[(r, i)] = s / lii;
        }
        let mut s = 0.0;
        for k in 0..i {
            s += l[(i, k)] * y[k];
        }
        y[i] = truncated_mean_above(-s / lii);
    }
    Ok(OrderedFactor { p, l })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equi(p: usize, rho: f64) -> RMatrix {
        RMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { rho })
    }

    fn opts(target: f64, seed: u64) -> OrthantOptions {
        OrthantOptions {
            target_abs_error: target,
            seed,
            ..OrthantOptions::default()
        }
    }

    #[test]
    fn independent_five() {
        let r = orthant_qmc(&RMatrix::identity(5, 5), &opts(1e-8, 1)).unwrap();
        assert!((r.value - 0.03125).abs() <= 3.0 * r.abs_error + 1e-14, "{r:?}");
    }

    #[test]
    fn equicorrelated_triple() {
        let r = orthant_qmc(&equi(3, 0.5), &opts(1e-8, 7)).unwrap();
        assert!((r.value - 0.25).abs() <= 3.0 * r.abs_error + 1e-13, "{r:?}");
        assert!(!r.budget_exceeded);
    }

    #[test]
    fn half_equicorrelation_in_higher_dimensions() {
        for p in [5, 6, 8] {
            let r = orthant_qmc(&equi(p, 0.5), &opts(1e-7, 3)).unwrap();
            let want = 1.0 / (p as f64 + 1.0);
            assert!((r.value - want).abs() <= 4.0 * r.abs_error + 1e-12, "p={p}: {r:?}");
        }
    }

    #[test]
    fn seeded_runs_are_bit_identical() {
        let cov = equi(6, 0.3);
        let a = orthant_qmc(&cov, &opts(1e-6, 99)).unwrap();
        let b = orthant_qmc(&cov, &opts(1e-6, 99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let options = OrthantOptions {
            target_abs_error: 1e-10,
            max_points_per_replicate: 64,
            ..OrthantOptions::default()
        };
        let r = orthant_qmc(&equi(7, 0.6), &options).unwrap();
        assert!(r.budget_exceeded);
        assert!(r.abs_error > 0.0);
    }

    #[test]
    fn rejects_target_out_of_range() {
        assert!(orthant_qmc(&equi(3, 0.1), &opts(0.5, 0)).is_err());
    }
}
