//! Operating points where noise correlation makes the estimator linear.
//!
//! For two antennas with complex constants, the estimator is linear at the
//! SNR where `Re β_c` (or `Im β_c`) vanishes. For real constants and any `n`
//! it is linear where `β = 0`.

use std::f64::consts::PI;

use serde::Serialize;

use super::{check_word_len, simo_prefactor, Diagnostics, EstimateReport, EstimatorMethod};
use crate::linalg::{CMatrix, CVector};
use crate::model::{build_constant_correlation, CorrelationKind, OneBitWord};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearPointMode {
    /// `Re(γφ + ξ) = 0`, two antennas.
    ComplexRe,
    /// `Im(γφ + ξ) = 0`, two antennas.
    ComplexIm,
    /// `γφ + ξ = 0` with real constants, any `n`.
    Real,
}

impl std::str::FromStr for LinearPointMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex_re" => Ok(LinearPointMode::ComplexRe),
            "complex_im" => Ok(LinearPointMode::ComplexIm),
            "real" => Ok(LinearPointMode::Real),
            other => Err(Error::domain("mode", other, "one of complex_re, complex_im, real")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialLinearCase {
    pub mode: LinearPointMode,
    pub n: usize,
    pub phi: Complex64,
    pub xi: Complex64,
    /// The SNR at which the estimator is linear.
    pub gamma_star: f64,
    pub mmse_closed: f64,
    /// `κ₂` for `ComplexRe`, `κ₁` for `ComplexIm`, zero for `Real`.
    pub kappa: f64,
    /// Rows of `M` in `ĥ = s*·√(γ*/(π(1+γ*)))·Φ M⁻¹ r`.
    pub linear_matrix: Vec<Vec<Complex64>>,
    #[serde(skip)]
    phi_matrix: CMatrix,
    #[serde(skip)]
    m_inverse: CMatrix,
}

fn no_linear_point(mode: &str, what: &str) -> Error {
    Error::NoLinearPoint(format!("{mode}: {what}"))
}

/// Locates the linear operating point; `n` must be 2 for the complex modes.
pub fn special_linear_case(
    phi: Complex64,
    xi: Complex64,
    mode: LinearPointMode,
    n: usize,
) -> Result<SpecialLinearCase> {
    let j = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let (kind, gamma_star, kappa, matrix, mmse) = match mode {
        LinearPointMode::ComplexRe | LinearPointMode::ComplexIm => {
            if n != 2 {
                return Err(Error::Precondition(format!(
                    "complex linear points are defined for n = 2, got n = {n}"
                )));
            }
            let re_mode = mode == LinearPointMode::ComplexRe;
            let (p, x) = if re_mode { (phi.re, xi.re) } else { (phi.im, xi.im) };
            if p == 0.0 || x * p >= 0.0 {
                let part = if re_mode { "Re" } else { "Im" };
                return Err(no_linear_point(
                    if re_mode { "complex_re" } else { "complex_im" },
                    &format!("needs {part} phi != 0 with {part} xi of opposite sign"),
                ));
            }
            let g = -x / p;
            let beta = (phi * g + xi) / (1.0 + g);
            let (kappa, matrix, inner) = if re_mode {
                let k = crate::special::clamped_asin(beta.im);
                let m = CMatrix::from_row_slice(2, 2, &[one, -j * 2.0 * k / PI, j * 2.0 * k / PI, one]);
                (k, m, 1.0 + phi.norm_sqr() - 4.0 * k / PI * phi.im)
            } else {
                let k = crate::special::clamped_asin(beta.re);
                let c = one * (2.0 * k / PI);
                let m = CMatrix::from_row_slice(2, 2, &[one, c, c, one]);
                (k, m, 1.0 + phi.norm_sqr() - 4.0 * k / PI * phi.re)
            };
            let mmse = 1.0 - 2.0 * PI * g * inner / ((1.0 + g) * (PI * PI - 4.0 * kappa * kappa));
            (CorrelationKind::Complex, g, kappa, matrix, mmse)
        }
        LinearPointMode::Real => {
            if phi.im != 0.0 || xi.im != 0.0 {
                return Err(Error::domain("phi, xi", format!("{phi}, {xi}"), "real parameters"));
            }
            if phi.re == 0.0 || xi.re * phi.re >= 0.0 {
                return Err(no_linear_point("real", "needs phi != 0 with xi of opposite sign"));
            }
            let g = -xi.re / phi.re;
            let nf = n as f64;
            let mmse = 1.0 - 2.0 * g * (1.0 + (nf - 1.0) * phi.re * phi.re) / (PI * (1.0 + g));
            (CorrelationKind::Real, g, 0.0, CMatrix::identity(n, n), mmse)
        }
    };
    let phi_matrix = build_constant_correlation(kind, phi, n)?;
    build_constant_correlation(kind, xi, n)?;
    let m_inverse = matrix
        .clone()
        .try_inverse()
        .ok_or(Error::Singular("linear-point matrix"))?;
    Ok(SpecialLinearCase {
        mode,
        n,
        phi,
        xi,
        gamma_star,
        mmse_closed: mmse,
        kappa,
        linear_matrix: matrix.row_iter().map(|row| row.iter().copied().collect()).collect(),
        phi_matrix,
        m_inverse,
    })
}

impl SpecialLinearCase {
    /// `ĥ(r)` at `γ*` for pilot symbol `s`.
    pub fn estimate(&self, r: &OneBitWord, pilot_symbol: Complex64) -> Result<EstimateReport> {
        check_word_len(r, self.n)?;
        let scale = simo_prefactor(pilot_symbol, self.gamma_star, 1.0);
        let h = &self.phi_matrix * &self.m_inverse * CVector::from_vec(r.to_complex()) * scale;
        Ok(EstimateReport {
            h_hat: h.iter().copied().collect(),
            method: EstimatorMethod::SpecialLinear,
            outcome_prob: None,
            abs_error: vec![0.0; self.n],
            diagnostics: Diagnostics::None,
        })
    }
}

/// `1 − 2γ/(π(1+γ))`, the MMSE with uncorrelated channel and noise for any `n`.
pub fn mmse_closed_uncorrelated(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::domain("gamma", gamma, "gamma > 0"));
    }
    Ok(1.0 - 2.0 * gamma / (PI * (1.0 + gamma)))
}
