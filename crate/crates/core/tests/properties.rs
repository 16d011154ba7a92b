//! Randomized invariants.

use std::f64::consts::PI;

use onebit_mmse::estimators::{
    mmse_exact_prop1, mmse_exact_prop2, GeneralEstimator, Prop1Estimator, Prop2Estimator,
};
use onebit_mmse::linalg::{sign_conjugate, RMatrix};
use onebit_mmse::model::{CorrelationKind, CovariancePair, OneBitWord, SystemConfig};
use onebit_mmse::orthant::{orthant_closed, orthant_from_precision, orthant_prob, OrthantOptions};
use onebit_mmse::validation::{combined_bound, random_spd, signs_from_mask};
use onebit_mmse::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orthant_signs_partition_unity(seed in any::<u64>(), p in 1usize..=4) {
        let cov = random_spd(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let (mut total, mut err) = (0.0, 0.0);
        for mask in 0..1usize << p {
            let r = orthant_prob(&sign_conjugate(&cov, &signs_from_mask(mask, p)), &OrthantOptions::default()).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.value));
            total += r.value;
            err += r.abs_error;
        }
        prop_assert!((total - 1.0).abs() <= combined_bound(err, 0.0));
    }

    #[test]
    fn orthant_is_scale_invariant(seed in any::<u64>(), p in 2usize..=3, scales in prop::collection::vec(0.1f64..10.0, 3)) {
        let cov = random_spd(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = RMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p, scales.iter().take(p).map(|s| s.sqrt())));
        let scaled = &d * &cov * &d;
        let a = orthant_closed(&cov).unwrap().value;
        let b = orthant_closed(&scaled).unwrap().value;
        prop_assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn precision_form_matches_covariance_form(seed in any::<u64>(), p in 1usize..=3) {
        let cov = random_spd(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let precision = cov.clone().try_inverse().unwrap();
        let a = orthant_closed(&cov).unwrap().value;
        let b = orthant_from_precision(&precision, &OrthantOptions::default()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn two_antenna_estimator_invariants(
        db in -10.0f64..30.0,
        phi_mag in 0.0f64..0.95, phi_arg in -PI..PI,
        xi_mag in 0.0f64..0.95, xi_arg in -PI..PI,
        s_arg in -PI..PI,
    ) {
        let gamma = 10f64.powf(db / 10.0);
        let phi = Complex64::from_polar(phi_mag, phi_arg);
        let xi = Complex64::from_polar(xi_mag, xi_arg);
        let s = Complex64::from_polar(1.0, s_arg);
        let est = Prop1Estimator::new(gamma, phi, xi, s).unwrap();
        let total: f64 = OneBitWord::all(2).map(|r| est.outcome_prob(&r)).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for r in OneBitWord::all(2) {
            let h = est.estimate(&r).unwrap().h_hat;
            let hn = est.estimate(&r.negated()).unwrap().h_hat;
            let hj = est.estimate(&r.rotated()).unwrap().h_hat;
            for k in 0..2 {
                prop_assert_eq!(hn[k], -h[k]);
                prop_assert!((hj[k] - c(0.0, 1.0) * h[k]).norm() < 1e-9);
            }
        }
        let mmse = mmse_exact_prop1(gamma, phi, xi).unwrap();
        prop_assert!(mmse > 0.0 && mmse < 1.0);
    }

    #[test]
    fn real_equicorrelated_mmse_is_a_fraction(n in 1usize..=12, db in -10.0f64..30.0, phi in 0.0f64..0.95, xi in 0.0f64..0.95) {
        let gamma = 10f64.powf(db / 10.0);
        let est = Prop2Estimator::new(n, gamma, phi, xi, c(1.0, 0.0)).unwrap();
        let mmse = mmse_exact_prop2(n, gamma, phi, xi).unwrap();
        prop_assert!(mmse > 0.0 && mmse < 1.0, "{}", mmse);
        prop_assert!((est.mmse_exact() - mmse).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn real_closed_form_matches_general(n in 1usize..=3, db in -5.0f64..15.0, phi in 0.0f64..0.9, xi in 0.0f64..0.9, key in any::<u64>()) {
        let gamma = 10f64.powf(db / 10.0);
        let config = SystemConfig::simo_unit(n, gamma).unwrap();
        let cov = CovariancePair::constant(&config, CorrelationKind::Real, c(phi, 0.0), c(xi, 0.0)).unwrap();
        let general = GeneralEstimator::new(&config, &cov, OrthantOptions::default()).unwrap();
        let closed = Prop2Estimator::from_config(&config, &cov).unwrap();
        let r = OneBitWord::from_key(key & ((1 << (2 * n)) - 1), n);
        let a = general.estimate(&r).unwrap();
        let b = closed.estimate(&r).unwrap();
        for k in 0..n {
            prop_assert!((a.h_hat[k] - b.h_hat[k]).norm() <= combined_bound(a.abs_error[k], b.abs_error[k]));
        }
    }
}
