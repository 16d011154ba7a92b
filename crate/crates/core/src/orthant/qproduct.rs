//! `E_Z[∏ᵢ Q(sᵢ · a · Z)]` for standard normal `Z`.
//!
//! The integrand only depends on how many signs are positive, so the work is
//! a single adaptive quadrature of `φ(z) Q(az)^p Q(−az)^q`. As `a` grows the
//! factors approach step functions at the origin; the initial panels are
//! graded towards zero on the scale `1/a` so the refinement sees them.

use crate::quadrature::integrate_with_breaks;
use crate::special::{gaussian_q, normal_pdf};

const HALF_WIDTH: f64 = 8.0;
const TOLERANCE: f64 = 1e-13;
const SMALL_VALUE: f64 = 1e-2;
const RELATIVE_TOLERANCE: f64 = 1e-11;

pub fn expectation_q_product(signs: &[f64], scale: f64) -> f64 {
    let positive = signs.iter().filter(|s| **s > 0.0).count();
    expectation_q_counts(positive, signs.len() - positive, scale)
}

/// `E_Z[Q(aZ)^positive · Q(−aZ)^negative]`.
pub fn expectation_q_counts(positive: usize, negative: usize, scale: f64) -> f64 {
    let k = positive + negative;
    if k == 0 {
        return 1.0;
    }
    // Z ↦ −Z makes the sign of the scale irrelevant
    let a = scale.abs();
    if a == 0.0 {
        return 0.5f64.powi(k as i32);
    }
    let integrand = |z: f64| {
        let qp = gaussian_q(a * z);
        let qn = gaussian_q(-a * z);
        normal_pdf(z) * qp.powi(positive as i32) * qn.powi(negative as i32)
    };
    let mut breaks = vec![-HALF_WIDTH, 0.0, HALF_WIDTH];
    for c in [0.125, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let x = c / a;
        if x < HALF_WIDTH {
            breaks.push(x);
            breaks.push(-x);
        }
    }
    for x in [0.5, 1.0, 2.0, 4.0] {
        breaks.push(x);
        breaks.push(-x);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let first = integrate_with_breaks(&integrand, &breaks, TOLERANCE).value;
    if first >= SMALL_VALUE {
        return first;
    }
    // tiny results need a relative tolerance
    let tol = (first * RELATIVE_TOLERANCE).max(f64::MIN_POSITIVE);
    integrate_with_breaks(&integrand, &breaks, tol).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // E[Q(aZ)Q(bZ)] is the orthant probability of a pair with correlation
    // ab / sqrt((1+a²)(1+b²)).
    fn pair_closed(s1: f64, s2: f64, a: f64) -> f64 {
        let rho = s1 * s2 * a * a / (1.0 + a * a);
        0.25 + rho.asin() / (2.0 * PI)
    }

    #[test]
    fn zero_scale() {
        assert_eq!(expectation_q_product(&[1.0, -1.0, 1.0], 0.0), 0.125);
    }

    #[test]
    fn opposite_pair_at_unit_scale_is_one_sixth() {
        let v = expectation_q_product(&[1.0, -1.0], 1.0);
        assert!((v - 1.0 / 6.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn matches_bivariate_closed_form() {
        for &a in &[0.01, 0.3, 1.0, 3.0, 50.0, 1e3] {
            for &(s1, s2) in &[(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let got = expectation_q_product(&[s1, s2], a);
                let want = pair_closed(s1, s2, a);
                assert!((got - want).abs() < 1e-10, "a={a} s=({s1},{s2}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn single_factor_is_one_half() {
        for &a in &[0.2, 5.0, 500.0] {
            assert!((expectation_q_counts(1, 0, a) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_product() {
        assert_eq!(expectation_q_product(&[], 2.0), 1.0);
    }
}
