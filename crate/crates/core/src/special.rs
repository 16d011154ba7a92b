//! Scalar Gaussian special functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use libm::erfc;
use statrs::function::erf::erfc_inv;

/// Gaussian tail probability `Q(x) = P(Z > x)` for standard normal `Z`.
///
/// Evaluated through `erfc` so both tails keep full relative precision.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    gaussian_q(-x)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse of the standard normal CDF. `p` is clamped into `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    if !x.is_finite() {
        return x;
    }
    // one Newton step polishes the inverse to the accuracy of `erfc`
    let density = normal_pdf(x);
    if density > 0.0 {
        x - (normal_cdf(x) - p) / density
    } else {
        x
    }
}

/// Unpolished inverse CDF for sampling loops, accurate to about 1e-13 in `p`.
pub(crate) fn fast_normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// `E[Z | Z > a]` for standard normal `Z` (inverse Mills ratio).
pub(crate) fn truncated_mean_above(a: f64) -> f64 {
    let tail = gaussian_q(a);
    if tail > 0.0 {
        normal_pdf(a) / tail
    } else {
        // asymptotic: the conditional mean hugs the truncation point
        a.max(0.0) + 1.0 / a.max(1.0)
    }
}

/// `arcsin` with the argument clamped into `[-1, 1]` against rounding.
pub fn clamped_asin(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_at_zero_is_half() {
        assert_eq!(gaussian_q(0.0), 0.5);
    }

    #[test]
    fn q_underflows_far_in_the_tail() {
        assert!(gaussian_q(40.0) < 1e-300);
    }

    #[test]
    fn q_at_one_matches_direct_integration() {
        // Simpson's rule on the defining integral over [1, 12]
        let (a, b, n) = (1.0, 12.0, 200_000);
        let h = (b - a) / n as f64;
        let mut sum = normal_pdf(a) + normal_pdf(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * normal_pdf(a + i as f64 * h);
        }
        let simpson = sum * h / 3.0;
        assert!((simpson - 0.158_655_253_931_457_05).abs() < 1e-13);
        assert!((gaussian_q(1.0) - simpson).abs() < 1e-13);
    }

    #[test]
    fn q_reflection_identity() {
        let mut x = -8.0;
        while x <= 8.0 {
            assert!((gaussian_q(x) + gaussian_q(-x) - 1.0).abs() < 1e-14, "x = {x}");
            x += 0.0625;
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let x = normal_quantile(p);
            assert!((normal_cdf(x) - p).abs() < 1e-12 * p.max(1e-3), "p = {p}");
        }
    }

    #[test]
    fn mills_ratio_at_zero() {
        assert!((truncated_mean_above(0.0) - (2.0 / PI).sqrt()).abs() < 1e-15);
    }
}
