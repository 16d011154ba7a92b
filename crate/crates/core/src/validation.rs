//! Self-check suites: orthant engine sanity, agreement between estimator
//! paths, and high-SNR limits. Each check reports the measured discrepancy
//! next to the bound it was held to.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::estimators::{
    mmse_closed_uncorrelated, mmse_exact_prop1, mmse_exact_prop2, special_linear_case, GeneralEstimator,
    LinearEstimator, LinearPointMode, Prop1Estimator, Prop2Estimator,
};
use crate::linalg::{sign_conjugate, RMatrix};
use crate::model::{CorrelationKind, CovariancePair, OneBitWord, SystemConfig};
use crate::orthant::{orthant_closed, orthant_prob, orthant_qmc, orthant_quadrature_p4, OrthantOptions};
use crate::{Complex64, Error, Result};

/// Floor added to error-based bounds so exact paths are not held to zero.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Orthant,
    Consistency,
    Asymptotic,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthant" => Ok(Suite::Orthant),
            "consistency" => Ok(Suite::Consistency),
            "asymptotic" => Ok(Suite::Asymptotic),
            "all" => Ok(Suite::All),
            other => Err(Error::domain("suite", other, "one of orthant, consistency, asymptotic, all")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// Largest discrepancy observed.
    pub measured: f64,
    /// The bound it was compared with (for the worst case).
    pub bound: f64,
}

/// Tracks the worst `measured / bound` ratio over many comparisons.
struct Worst {
    measured: f64,
    bound: f64,
    passed: bool,
}

impl Worst {
    fn new() -> Self {
        Self {
            measured: 0.0,
            bound: f64::INFINITY,
            passed: true,
        }
    }

    fn record(&mut self, measured: f64, bound: f64) {
        let ok = measured <= bound;
        let worse = !self.bound.is_finite() || measured / bound > self.measured / self.bound;
        if worse || (self.passed && !ok) {
            self.measured = measured;
            self.bound = bound;
        }
        self.passed &= ok;
    }

    fn finish(self, suite: &'static str, name: impl Into<String>) -> CheckOutcome {
        CheckOutcome {
            suite,
            name: name.into(),
            passed: self.passed,
            measured: self.measured,
            bound: if self.bound.is_finite() { self.bound } else { 0.0 },
        }
    }
}

/// `5·(ea + eb) + ROUNDOFF_FLOOR`, the bound used for cross-path agreement.
pub fn combined_bound(ea: f64, eb: f64) -> f64 {
    5.0 * (ea + eb) + ROUNDOFF_FLOOR
}

/// Symmetric positive definite test matrix `AAᵀ/p + 0.3 I` with Gaussian `A`.
pub fn random_spd(p: usize, rng: &mut ChaCha8Rng) -> RMatrix {
    let a = DMatrix::<f64>::from_fn(p, p, |_, _| StandardNormal.sample(rng));
    let m = &a * a.transpose() / p as f64 + RMatrix::identity(p, p) * 0.3;
    (&m + m.transpose()) * 0.5
}

/// Column signs for orthant index `mask` (bit set = negative).
pub fn signs_from_mask(mask: usize, p: usize) -> Vec<f64> {
    (0..p).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()
}

fn orthant_suite() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = OrthantOptions::default();
    for p in [2usize, 3, 4, 6] {
        let mut w = Worst::new();
        for _ in 0..3 {
            let cov = random_spd(p, &mut rng);
            let (mut total, mut err) = (0.0, 0.0);
            for mask in 0..1usize << p {
                let r = orthant_prob(&sign_conjugate(&cov, &signs_from_mask(mask, p)), &opts)?;
                total += r.value;
                err += r.abs_error;
            }
            w.record((total - 1.0).abs(), 5.0 * err + 1e-10);
        }
        out.push(w.finish("orthant", format!("sign patterns sum to one, p = {p}")));
    }

    let mut w = Worst::new();
    for p in [2usize, 3] {
        for k in 0..5 {
            let cov = random_spd(p, &mut rng);
            let exact = orthant_closed(&cov)?;
            let q = orthant_qmc(&cov, &OrthantOptions::with_target(1e-6, k))?;
            w.record((q.value - exact.value).abs(), 5.0 * q.abs_error + ROUNDOFF_FLOOR);
        }
    }
    out.push(w.finish("orthant", "quasi-Monte Carlo matches closed forms, p <= 3"));

    let mut w = Worst::new();
    for k in 0..4 {
        let cov = random_spd(4, &mut rng);
        let quad = orthant_quadrature_p4(&cov)?;
        let q = orthant_qmc(&cov, &OrthantOptions::with_target(1e-6, k))?;
        w.record((q.value - quad.value).abs(), combined_bound(q.abs_error, quad.abs_error));
    }
    out.push(w.finish("orthant", "quasi-Monte Carlo matches the four-variate quadrature"));

    let mut w = Worst::new();
    for p in [5usize, 7] {
        let corr = RMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.5 });
        let r = orthant_prob(&corr, &OrthantOptions::with_target(1e-6, 3))?;
        w.record((r.value - 1.0 / (p as f64 + 1.0)).abs(), 5.0 * r.abs_error + ROUNDOFF_FLOOR);
    }
    out.push(w.finish("orthant", "equicorrelation 1/2 gives 1/(p+1)"));
    Ok(out)
}

fn compare_reports(w: &mut Worst, a: &crate::estimators::EstimateReport, b: &crate::estimators::EstimateReport) {
    for k in 0..a.h_hat.len() {
        let diff = (a.h_hat[k] - b.h_hat[k]).norm();
        w.record(diff, combined_bound(a.abs_error[k], b.abs_error[k]));
    }
}

fn consistency_suite() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let opts = OrthantOptions::with_target(1e-8, 0x5eed);

    let s = Complex64::from_polar(1.0, 0.3);
    let cfg = SystemConfig::simo(2, 10f64.powf(0.5), s)?;
    let (phi, xi) = (Complex64::from_polar(0.9, -PI / 6.0), Complex64::from_polar(0.8, -PI / 3.0));
    let cov = CovariancePair::constant(&cfg, CorrelationKind::Complex, phi, xi)?;
    let general = GeneralEstimator::new(&cfg, &cov, opts)?;
    let closed = Prop1Estimator::from_config(&cfg, &cov)?;
    let mut w = Worst::new();
    for r in OneBitWord::all(2) {
        compare_reports(&mut w, &general.estimate(&r)?, &closed.estimate(&r)?);
    }
    out.push(w.finish("consistency", "two-antenna closed form matches the general estimator (16 outcomes)"));

    let cfg = SystemConfig::simo(3, 2.0, s)?;
    let cov = CovariancePair::constant(&cfg, CorrelationKind::Real, 0.6.into(), 0.3.into())?;
    let general = GeneralEstimator::new(&cfg, &cov, opts)?;
    let closed = Prop2Estimator::from_config(&cfg, &cov)?;
    let mut w = Worst::new();
    for r in OneBitWord::all(3) {
        compare_reports(&mut w, &general.estimate(&r)?, &closed.estimate(&r)?);
    }
    out.push(w.finish("consistency", "equicorrelated closed form matches the general estimator (n = 3)"));

    let cfg = SystemConfig::simo(2, 1.5, s)?;
    let cov = CovariancePair::constant(&cfg, CorrelationKind::Real, 0.4.into(), (-0.7).into())?;
    let general = GeneralEstimator::new(&cfg, &cov, opts)?;
    let linear = LinearEstimator::new(&cfg, &cov, false)?;
    let mut w = Worst::new();
    for r in OneBitWord::all(2) {
        compare_reports(&mut w, &general.estimate(&r)?, &linear.estimate(&r)?);
    }
    out.push(w.finish("consistency", "linear form matches the general estimator when exact"));

    let mut w = Worst::new();
    for (phi, xi, mode) in [
        (Complex64::new(0.3, 0.45), Complex64::new(0.2, -0.45), LinearPointMode::ComplexIm),
        (Complex64::new(0.6, -0.3), Complex64::new(-0.4, 0.5), LinearPointMode::ComplexRe),
    ] {
        let case = special_linear_case(phi, xi, mode, 2)?;
        let closed = Prop1Estimator::new(case.gamma_star, phi, xi, s)?;
        for r in OneBitWord::all(2) {
            compare_reports(&mut w, &case.estimate(&r, s)?, &closed.estimate(&r)?);
        }
        w.record((closed.mmse_exact() - case.mmse_closed).abs(), 1e-10);
    }
    out.push(w.finish("consistency", "noise-induced linear points match the two-antenna closed form"));
    Ok(out)
}

fn asymptotic_suite() -> Result<Vec<CheckOutcome>> {
    let limit = 1.0 - 2.0 / PI;
    let gamma = 1e6;
    let mut out = Vec::new();
    for (label, xi) in [("0", Complex64::new(0.0, 0.0)), ("0.8e^{-j pi/3}", Complex64::from_polar(0.8, -PI / 3.0))] {
        let m = mmse_exact_prop1(gamma, Complex64::new(0.0, 0.0), xi)?;
        let mut w = Worst::new();
        w.record((m - limit).abs(), 1e-2);
        out.push(w.finish("asymptotic", format!("two-antenna MMSE at 60 dB, phi = 0, xi = {label}, tends to 1 - 2/pi")));
    }
    let mut w = Worst::new();
    for (n, xi) in [(4usize, 0.5), (8, 0.9)] {
        w.record((mmse_exact_prop2(n, gamma, 0.0, xi)? - limit).abs(), 1e-2);
    }
    out.push(w.finish("asymptotic", "equicorrelated MMSE at 60 dB, phi = 0, tends to 1 - 2/pi"));
    let mut w = Worst::new();
    w.record((mmse_closed_uncorrelated(gamma)? - limit).abs(), 1e-5);
    out.push(w.finish("asymptotic", "uncorrelated closed form at 60 dB"));
    Ok(out)
}

/// Runs a suite; an `Err` means a check could not be evaluated at all.
pub fn run_suite(suite: Suite) -> Result<Vec<CheckOutcome>> {
    Ok(match suite {
        Suite::Orthant => orthant_suite()?,
        Suite::Consistency => consistency_suite()?,
        Suite::Asymptotic => asymptotic_suite()?,
        Suite::All => {
            let mut all = orthant_suite()?;
            all.extend(consistency_suite()?);
            all.extend(asymptotic_suite()?);
            all
        }
    })
}
