//! The one-bit MIMO measurement model.
//!
//! `y = (Sᵀ ⊗ Iₙ) h + noise`, `h ~ CN(0, Φ)`, `noise ~ CN(0, Ξ)` and the
//! receiver only sees `r = sgn(Re y) + j sgn(Im y)`. The receive covariance is
//! `B = (Sᵀ ⊗ Iₙ) Φ (S* ⊗ Iₙ) + Ξ` and `B_c` is the covariance of the
//! stacked real and imaginary parts of `y`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{checked_cholesky, ensure_hermitian, real_embedding, CMatrix, RMatrix};
use crate::{Complex64, Error, Result};

/// Antenna counts, pilot matrix and transmit SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    m: usize,
    n: usize,
    tau: usize,
    pilot: CMatrix,
    gamma: f64,
    pilot_symbol: Complex64,
}

impl SystemConfig {
    /// Single transmit antenna, one pilot slot carrying `√γ·s` with `|s| = 1`.
    pub fn simo(n: usize, gamma: f64, pilot_symbol: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", n, "n >= 1"));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain("gamma", gamma, "gamma > 0"));
        }
        if (pilot_symbol.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain("|s|", pilot_symbol.norm(), "|s| = 1"));
        }
        let pilot = CMatrix::from_element(1, 1, pilot_symbol * gamma.sqrt());
        Ok(Self {
            m: 1,
            n,
            tau: 1,
            pilot,
            gamma,
            pilot_symbol,
        })
    }

    /// SIMO with `s = 1`.
    pub fn simo_unit(n: usize, gamma: f64) -> Result<Self> {
        Self::simo(n, gamma, Complex64::new(1.0, 0.0))
    }

    /// General MIMO geometry. The pilot already carries the transmit power;
    /// `gamma` is reported as the mean per-entry pilot energy.
    pub fn mimo(n: usize, pilot: CMatrix) -> Result<Self> {
        let (m, tau) = pilot.shape();
        if n == 0 || m == 0 || tau == 0 {
            return Err(Error::DimensionMismatch {
                context: "system config",
                expected: "m, n, tau >= 1".into(),
                actual: format!("m={m}, n={n}, tau={tau}"),
            });
        }
        let gamma = pilot.iter().map(|z| z.norm_sqr()).sum::<f64>() / (m * tau) as f64;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::domain("pilot energy", gamma, "> 0"));
        }
        let pilot_symbol = if m == 1 && tau == 1 {
            pilot[(0, 0)] / pilot[(0, 0)].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(Self {
            m,
            n,
            tau,
            pilot,
            gamma,
            pilot_symbol,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn tau(&self) -> usize {
        self.tau
    }
    pub fn pilot(&self) -> &CMatrix {
        &self.pilot
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn pilot_symbol(&self) -> Complex64 {
        self.pilot_symbol
    }
    pub fn is_simo(&self) -> bool {
        self.m == 1 && self.tau == 1
    }
    /// Length of `h`, `m·n`.
    pub fn channel_len(&self) -> usize {
        self.m * self.n
    }
    /// Length of `y` and `r`, `τ·n`.
    pub fn observation_len(&self) -> usize {
        self.tau * self.n
    }

    /// `Sᵀ ⊗ Iₙ`, mapping `vec(H)` to `vec(HS)`.
    pub fn measurement_matrix(&self) -> CMatrix {
        self.pilot
            .transpose()
            .kronecker(&CMatrix::identity(self.n, self.n))
    }

    /// `S* ⊗ Iₙ`, the adjoint of [`measurement_matrix`](Self::measurement_matrix).
    pub fn adjoint_measurement_matrix(&self) -> CMatrix {
        self.measurement_matrix().adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Complex,
    Real,
}

/// How a covariance matrix is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationModel {
    /// Unit diagonal, `φ` below and `φ*` above the diagonal.
    ComplexConstant(Complex64),
    /// `(1 − φ) I + φ 1 1ᵀ`.
    RealConstant(f64),
    Explicit(CMatrix),
}

impl CorrelationModel {
    pub fn constant(kind: CorrelationKind, param: Complex64) -> Self {
        match kind {
            CorrelationKind::Complex => CorrelationModel::ComplexConstant(param),
            CorrelationKind::Real => CorrelationModel::RealConstant(param.re),
        }
    }

    /// `(kind, parameter)` for the constant models.
    pub fn constant_parameter(&self) -> Option<(CorrelationKind, Complex64)> {
        match self {
            CorrelationModel::ComplexConstant(p) => Some((CorrelationKind::Complex, *p)),
            CorrelationModel::RealConstant(p) => Some((CorrelationKind::Real, Complex64::new(*p, 0.0))),
            CorrelationModel::Explicit(_) => None,
        }
    }

    fn realize(&self, name: &'static str, dim: usize) -> Result<CMatrix> {
        match self {
            CorrelationModel::ComplexConstant(p) => {
                build_constant_correlation(CorrelationKind::Complex, *p, dim)
            }
            CorrelationModel::RealConstant(p) => {
                build_constant_correlation(CorrelationKind::Real, Complex64::new(*p, 0.0), dim)
            }
            CorrelationModel::Explicit(m) => {
                if m.shape() != (dim, dim) {
                    return Err(Error::DimensionMismatch {
                        context: name,
                        expected: format!("{dim}x{dim}"),
                        actual: format!("{}x{}", m.nrows(), m.ncols()),
                    });
                }
                ensure_hermitian(m, name)?;
                checked_cholesky(m, name)?;
                Ok(m.clone())
            }
        }
    }
}

/// Open interval of admissible real equicorrelation parameters for `dim`.
pub fn real_correlation_bounds(dim: usize) -> (f64, f64) {
    if dim <= 1 {
        (-1.0, 1.0)
    } else {
        (-1.0 / (dim as f64 - 1.0), 1.0)
    }
}

/// Builds a unit-diagonal constant-correlation matrix of size `dim`.
pub fn build_constant_correlation(
    kind: CorrelationKind,
    param: Complex64,
    dim: usize,
) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::domain("dim", dim, "dim >= 1"));
    }
    match kind {
        CorrelationKind::Real => {
            if param.im != 0.0 {
                return Err(Error::domain(
                    "real correlation",
                    param,
                    "a real parameter (zero imaginary part)",
                ));
            }
            let (lo, hi) = real_correlation_bounds(dim);
            if !(param.re > lo && param.re < hi) {
                return Err(Error::domain(
                    "real correlation",
                    param.re,
                    format!("the open interval ({lo}, {hi}) for dimension {dim}"),
                ));
            }
            let rho = param.re;
            Ok(CMatrix::from_fn(dim, dim, |i, j| {
                Complex64::new(if i == j { 1.0 } else { rho }, 0.0)
            }))
        }
        CorrelationKind::Complex => {
            if !(param.norm() < 1.0) {
                return Err(Error::domain(
                    "complex correlation",
                    param,
                    "|parameter| < 1",
                ));
            }
            let m = CMatrix::from_fn(dim, dim, |i, j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
                std::cmp::Ordering::Greater => param,
                std::cmp::Ordering::Less => param.conj(),
            });
            if dim > 2 {
                checked_cholesky(&m, "complex constant correlation").map_err(|_| {
                    Error::domain(
                        "complex correlation",
                        param,
                        format!("positive definiteness at dimension {dim}"),
                    )
                })?;
            }
            Ok(m)
        }
    }
}

/// Channel covariance `Φ` (size `mn`) and noise covariance `Ξ` (size `τn`).
#[derive(Debug, Clone, PartialEq)]
pub struct CovariancePair {
    phi_model: CorrelationModel,
    xi_model: CorrelationModel,
    phi: CMatrix,
    xi: CMatrix,
}

impl CovariancePair {
    pub fn new(
        config: &SystemConfig,
        phi_model: CorrelationModel,
        xi_model: CorrelationModel,
    ) -> Result<Self> {
        let phi = phi_model.realize("channel covariance", config.channel_len())?;
        let xi = xi_model.realize("noise covariance", config.observation_len())?;
        Ok(Self {
            phi_model,
            xi_model,
            phi,
            xi,
        })
    }

    /// Both covariances from the same constant-correlation family.
    pub fn constant(
        config: &SystemConfig,
        kind: CorrelationKind,
        phi: Complex64,
        xi: Complex64,
    ) -> Result<Self> {
        Self::new(
            config,
            CorrelationModel::constant(kind, phi),
            CorrelationModel::constant(kind, xi),
        )
    }

    pub fn uncorrelated(config: &SystemConfig) -> Result<Self> {
        Self::constant(config, CorrelationKind::Real, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn phi(&self) -> &CMatrix {
        &self.phi
    }
    pub fn xi(&self) -> &CMatrix {
        &self.xi
    }
    pub fn phi_model(&self) -> &CorrelationModel {
        &self.phi_model
    }
    pub fn xi_model(&self) -> &CorrelationModel {
        &self.xi_model
    }

    /// `(kind, φ, ξ)` when both covariances are constant models. Mixed kinds
    /// report `Complex` because the real family is a special case of it.
    pub fn constant_parameters(&self) -> Option<(CorrelationKind, Complex64, Complex64)> {
        let (kp, p) = self.phi_model.constant_parameter()?;
        let (kx, x) = self.xi_model.constant_parameter()?;
        let kind = if kp == CorrelationKind::Real && kx == CorrelationKind::Real {
            CorrelationKind::Real
        } else {
            CorrelationKind::Complex
        };
        Some((kind, p, x))
    }
}

/// Receive covariance `B` and its real embedding `B_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCovariance {
    pub b: CMatrix,
    pub b_c: RMatrix,
}

impl EffectiveCovariance {
    /// Real diagonal of `B`.
    pub fn diag(&self) -> Vec<f64> {
        (0..self.b.nrows()).map(|i| self.b[(i, i)].re).collect()
    }
}

pub fn build_effective_covariance(
    config: &SystemConfig,
    cov: &CovariancePair,
) -> Result<EffectiveCovariance> {
    let mn = config.channel_len();
    let tn = config.observation_len();
    if cov.phi().shape() != (mn, mn) {
        return Err(Error::DimensionMismatch {
            context: "channel covariance",
            expected: format!("{mn}x{mn}"),
            actual: format!("{}x{}", cov.phi().nrows(), cov.phi().ncols()),
        });
    }
    if cov.xi().shape() != (tn, tn) {
        return Err(Error::DimensionMismatch {
            context: "noise covariance",
            expected: format!("{tn}x{tn}"),
            actual: format!("{}x{}", cov.xi().nrows(), cov.xi().ncols()),
        });
    }
    let a = config.measurement_matrix();
    let mut b = &a * cov.phi() * a.adjoint() + cov.xi();
    // enforce exact Hermitian symmetry
    for i in 0..tn {
        b[(i, i)].im = 0.0;
        for j in 0..i {
            let avg = 0.5 * (b[(i, j)] + b[(j, i)].conj());
            b[(i, j)] = avg;
            b[(j, i)] = avg.conj();
        }
    }
    checked_cholesky(&b, "receive covariance B")?;
    let b_c = real_embedding(&b);
    checked_cholesky(&b_c, "real embedding B_c")?;
    Ok(EffectiveCovariance { b, b_c })
}

/// A quantized observation in `{±1 ± j}^len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OneBitWord {
    re: Vec<i8>,
    im: Vec<i8>,
}

fn sign_of(x: f64) -> i8 {
    // sgn(0) = +1
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Element-wise `sgn(Re y) + j sgn(Im y)`.
pub fn quantize_one_bit(y: &[Complex64]) -> OneBitWord {
    OneBitWord {
        re: y.iter().map(|z| sign_of(z.re)).collect(),
        im: y.iter().map(|z| sign_of(z.im)).collect(),
    }
}

impl OneBitWord {
    pub fn from_signs(re: Vec<i8>, im: Vec<i8>) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::InvalidWord(format!(
                "{} real signs vs {} imaginary signs",
                re.len(),
                im.len()
            )));
        }
        if let Some(bad) = re.iter().chain(&im).find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidWord(format!("sign {bad} is not ±1")));
        }
        Ok(Self { re, im })
    }

    /// Accepts only entries that are exactly `±1 ± j`.
    pub fn from_complex(r: &[Complex64]) -> Result<Self> {
        let mut re = Vec::with_capacity(r.len());
        let mut im = Vec::with_capacity(r.len());
        for z in r {
            if z.re.abs() != 1.0 || z.im.abs() != 1.0 {
                return Err(Error::InvalidWord(format!("entry {z} is not ±1±j")));
            }
            re.push(z.re as i8);
            im.push(z.im as i8);
        }
        Ok(Self { re, im })
    }

    /// Word with bit `k` of `key` giving the sign of entry `k` of the
    /// concatenated `(Re r, Im r)` (set bit = −1).
    pub fn from_key(key: u64, len: usize) -> Self {
        let bit = |i: usize| if key >> i & 1 == 1 { -1 } else { 1 };
        Self {
            re: (0..len).map(bit).collect(),
            im: (0..len).map(|k| bit(k + len)).collect(),
        }
    }

    /// Inverse of [`from_key`](Self::from_key). Requires `2·len ≤ 64`.
    pub fn key(&self) -> u64 {
        let len = self.len();
        debug_assert!(2 * len <= 64);
        let mut key = 0u64;
        for (i, s) in self.re.iter().chain(&self.im).enumerate() {
            if *s < 0 {
                key |= 1 << i;
            }
        }
        let _ = len;
        key
    }

    /// All `4^len` words in key order.
    pub fn all(len: usize) -> impl Iterator<Item = OneBitWord> {
        assert!(2 * len < 64, "alphabet too large to enumerate");
        (0..1u64 << (2 * len)).map(move |k| OneBitWord::from_key(k, len))
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }
    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }
    pub fn re_signs(&self) -> &[i8] {
        &self.re
    }
    pub fn im_signs(&self) -> &[i8] {
        &self.im
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| Complex64::new(*a as f64, *b as f64))
            .collect()
    }

    /// `(Re r, Im r)` as ±1 reals; the diagonal of `Λ_r`.
    pub fn sign_vector(&self) -> Vec<f64> {
        self.re.iter().chain(&self.im).map(|s| *s as f64).collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            re: self.re.iter().map(|s| -s).collect(),
            im: self.im.iter().map(|s| -s).collect(),
        }
    }

    /// `j·r`.
    pub fn rotated(&self) -> Self {
        Self {
            re: self.im.iter().map(|s| -s).collect(),
            im: self.re.clone(),
        }
    }
}

impl fmt::Display for OneBitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, b)) in self.re.iter().zip(&self.im).enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            let sa = if *a > 0 { '+' } else { '-' };
            let sb = if *b > 0 { '+' } else { '-' };
            write!(f, "{sa}1{sb}1j")?;
        }
        Ok(())
    }
}

impl Serialize for OneBitWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OneBitWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for OneBitWord {
    type Err = Error;

    /// Parses comma-separated entries such as `"+1+1j,-1+1j"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut re = Vec::new();
        let mut im = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let t = token.replace(' ', "");
            let t = t.strip_suffix(['j', 'i']).ok_or_else(|| {
                Error::InvalidWord(format!("entry `{token}` lacks an imaginary unit"))
            })?;
            let split = t
                .char_indices()
                .skip(1)
                .find(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .ok_or_else(|| Error::InvalidWord(format!("entry `{token}` is not a±bj")))?;
            let (a, b) = t.split_at(split);
            let parse = |x: &str| -> Result<i8> {
                match x.trim_start_matches('+') {
                    "1" | "1.0" => Ok(1),
                    "-1" | "-1.0" => Ok(-1),
                    _ => Err(Error::InvalidWord(format!("entry `{token}` is not ±1±j"))),
                }
            };
            re.push(parse(a)?);
            im.push(parse(b)?);
        }
        if re.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        Ok(Self { re, im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_real_correlation_is_identity() {
        let m = build_constant_correlation(CorrelationKind::Real, c(0.0, 0.0), 4).unwrap();
        assert_eq!(m, CMatrix::identity(4, 4));
    }

    #[test]
    fn complex_constant_layout() {
        let phi = Complex64::from_polar(0.9, -PI / 6.0);
        let m = build_constant_correlation(CorrelationKind::Complex, phi, 2).unwrap();
        assert_eq!(m[(1, 0)], phi);
        assert!((m[(0, 1)] - Complex64::from_polar(0.9, PI / 6.0)).norm() < 1e-15);
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn negative_real_correlation_spectrum() {
        let m = build_constant_correlation(CorrelationKind::Real, c(-0.4, 0.0), 3).unwrap();
        let re = m.map(|z| z.re);
        let mut eig: Vec<f64> = re.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (got, want) in eig.iter().zip([0.2, 1.4, 1.4]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_parameters() {
        let e = build_constant_correlation(CorrelationKind::Real, c(-0.5, 0.0), 3).unwrap_err();
        assert!(e.to_string().contains("-0.5"), "{e}");
        assert!(build_constant_correlation(CorrelationKind::Real, c(1.0, 0.0), 3).is_err());
        assert!(build_constant_correlation(CorrelationKind::Complex, c(0.8, 0.6), 2).is_err());
        assert!(build_constant_correlation(CorrelationKind::Real, c(0.3, 0.1), 2).is_err());
        // |φ| < 1 but not PD once dim > 2
        assert!(
            build_constant_correlation(CorrelationKind::Complex, Complex64::from_polar(0.95, 2.0), 5)
                .is_err()
        );
    }

    #[test]
    fn simo_effective_covariance() {
        let cfg = SystemConfig::simo_unit(2, 1.0).unwrap();
        let cov = CovariancePair::uncorrelated(&cfg).unwrap();
        let eff = build_effective_covariance(&cfg, &cov).unwrap();
        assert_eq!(eff.b, CMatrix::identity(2, 2) * c(2.0, 0.0));
    }

    #[test]
    fn simo_complex_effective_covariance() {
        let gamma = 3.0;
        let phi = c(0.3, -0.5);
        let xi = c(-0.2, 0.4);
        let cfg = SystemConfig::simo_unit(2, gamma).unwrap();
        let cov = CovariancePair::constant(&cfg, CorrelationKind::Complex, phi, xi).unwrap();
        let eff = build_effective_covariance(&cfg, &cov).unwrap();
        assert!((eff.b[(0, 0)] - c(1.0 + gamma, 0.0)).norm() < 1e-14);
        assert!((eff.b[(1, 0)] - (phi * gamma + xi)).norm() < 1e-14);
        assert!((eff.b[(0, 1)] - (phi.conj() * gamma + xi.conj())).norm() < 1e-14);
        let diag = eff.b_c.diagonal();
        for k in 0..4 {
            assert!((diag[k] - 0.5 * (1.0 + gamma)).abs() < 1e-14);
        }
    }

    #[test]
    fn mimo_identity_pilot() {
        let cfg = SystemConfig::mimo(1, CMatrix::identity(2, 2)).unwrap();
        let cov = CovariancePair::uncorrelated(&cfg).unwrap();
        let eff = build_effective_covariance(&cfg, &cov).unwrap();
        assert_eq!(eff.b, CMatrix::identity(2, 2) * c(2.0, 0.0));
    }

    #[test]
    fn mimo_kronecker_matches_direct_product() {
        // vec(H S) for a random H equals (Sᵀ ⊗ I) vec(H)
        let n = 3;
        let s = CMatrix::from_fn(2, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let cfg = SystemConfig::mimo(n, s.clone()).unwrap();
        let h = CMatrix::from_fn(n, 2, |i, j| c((i * 2 + j) as f64, 1.0 - i as f64));
        let hs = &h * &s;
        let vec_h = nalgebra::DVector::from_iterator(n * 2, h.iter().copied());
        let got = cfg.measurement_matrix() * vec_h;
        for (a, b) in got.iter().zip(hs.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let cfg = SystemConfig::simo_unit(2, 1.0).unwrap();
        let err = CovariancePair::new(
            &cfg,
            CorrelationModel::Explicit(CMatrix::identity(3, 3)),
            CorrelationModel::RealConstant(0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn quantizer_examples() {
        let r = quantize_one_bit(&[c(1.2, -0.3), c(-0.01, 5.0), c(0.0, 0.0)]);
        assert_eq!(r.to_complex(), vec![c(1.0, -1.0), c(-1.0, 1.0), c(1.0, 1.0)]);
    }

    #[test]
    fn word_parsing_and_display() {
        let w: OneBitWord = "+1+1j, -1+1j,+1-1j".parse().unwrap();
        assert_eq!(w.to_complex(), vec![c(1.0, 1.0), c(-1.0, 1.0), c(1.0, -1.0)]);
        assert_eq!(w.to_string(), "+1+1j,-1+1j,+1-1j");
        assert!("+1+2j".parse::<OneBitWord>().is_err());
        assert!("".parse::<OneBitWord>().is_err());
        assert!(OneBitWord::from_complex(&[c(0.5, 1.0)]).is_err());
    }

    #[test]
    fn rotation_multiplies_by_j() {
        let w: OneBitWord = "+1-1j,-1-1j".parse().unwrap();
        let jr: Vec<Complex64> = w.to_complex().iter().map(|z| z * c(0.0, 1.0)).collect();
        assert_eq!(w.rotated().to_complex(), jr);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantizer_is_idempotent(key in 0u64..(1 << 12)) {
                let w = OneBitWord::from_key(key, 6);
                prop_assert_eq!(quantize_one_bit(&w.to_complex()), w.clone());
                prop_assert_eq!(OneBitWord::from_key(w.key(), 6), w);
            }

            #[test]
            fn sign_vector_entries_are_unit(key in 0u64..(1 << 10)) {
                let w = OneBitWord::from_key(key, 5);
                prop_assert!(w.sign_vector().iter().all(|s| *s == 1.0 || *s == -1.0));
            }

            #[test]
            fn constant_models_are_valid(rho in -0.3f64..0.99, mag in 0.0f64..0.99, arg in -3.1f64..3.1) {
                let real = build_constant_correlation(CorrelationKind::Real, c(rho, 0.0), 4).unwrap();
                prop_assert!(checked_cholesky(&real, "real").is_ok());
                let cplx = build_constant_correlation(CorrelationKind::Complex, Complex64::from_polar(mag, arg), 2).unwrap();
                prop_assert_eq!(crate::linalg::hermitian_defect(&cplx), 0.0);
                prop_assert!(checked_cholesky(&cplx, "complex").is_ok());
                for i in 0..2 { prop_assert_eq!(cplx[(i, i)], c(1.0, 0.0)); }
            }

            #[test]
            fn effective_covariance_is_hermitian_pd(
                gamma in 0.05f64..50.0, pm in 0.0f64..0.95, pa in -3.1f64..3.1,
                xm in 0.0f64..0.95, xa in -3.1f64..3.1,
            ) {
                let cfg = SystemConfig::simo_unit(2, gamma).unwrap();
                let cov = CovariancePair::constant(&cfg, CorrelationKind::Complex,
                    Complex64::from_polar(pm, pa), Complex64::from_polar(xm, xa)).unwrap();
                let eff = build_effective_covariance(&cfg, &cov).unwrap();
                prop_assert_eq!(crate::linalg::hermitian_defect(&eff.b), 0.0);
                prop_assert_eq!(&eff.b_c, &eff.b_c.transpose());
                let min_eig = eff.b_c.clone().symmetric_eigen().eigenvalues.min();
                prop_assert!(min_eig > 0.0);
            }
        }
    }
}
