//! Dense matrix helpers shared by the model and the orthant engine.

use nalgebra::{ComplexField, DMatrix, Dyn};

use crate::{Complex64, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = nalgebra::DVector<Complex64>;

/// Pivots below this fraction of the largest diagonal entry count as zero.
pub const PD_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Hermitian (or symmetric) Cholesky factorization that additionally rejects
/// matrices whose smallest pivot is below `1e-12 × max diagonal`.
pub fn checked_cholesky<T>(m: &DMatrix<T>, context: &str) -> Result<nalgebra::Cholesky<T, Dyn>>
where
    T: ComplexField<RealField = f64>,
{
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch {
            context: "cholesky",
            expected: "non-empty square matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let max_diag = (0..m.nrows())
        .map(|i| m[(i, i)].clone().real())
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag > 0.0) || !max_diag.is_finite() {
        return Err(Error::NotPositiveDefinite {
            context: context.to_string(),
        });
    }
    let chol = nalgebra::Cholesky::new(m.clone()).ok_or_else(|| Error::NotPositiveDefinite {
        context: context.to_string(),
    })?;
    let l = chol.l_dirty();
    let threshold = PD_RELATIVE_TOLERANCE * max_diag;
    for i in 0..m.nrows() {
        let pivot = l[(i, i)].clone().real();
        if !(pivot * pivot >= threshold) {
            return Err(Error::NotPositiveDefinite {
                context: context.to_string(),
            });
        }
    }
    Ok(chol)
}

/// Largest `|m_ij − conj(m_ji)|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(m: &CMatrix, context: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian check",
            expected: "square matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let defect = hermitian_defect(m);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian {
            context: context.to_string(),
            asymmetry: defect,
        });
    }
    Ok(())
}

/// Covariance of `(Re z, Im z)` for circularly symmetric `z ~ CN(0, b)`:
/// `½ [[Re b, −Im b], [Im b, Re b]]`.
pub fn real_embedding(b: &CMatrix) -> RMatrix {
    let n = b.nrows();
    let mut out = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = b[(i, j)];
            out[(i, j)] = 0.5 * z.re;
            out[(i + n, j + n)] = 0.5 * z.re;
            out[(i, j + n)] = -0.5 * z.im;
            out[(i + n, j)] = 0.5 * z.im;
        }
    }
    out
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse(m: &RMatrix, context: &str) -> Result<RMatrix> {
    let chol = checked_cholesky(m, context)?;
    let inv = chol.inverse();
    Ok(symmetrize(&inv))
}

pub fn symmetrize(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

/// Deletes row and column `k`.
pub fn delete_row_col(m: &RMatrix, k: usize) -> RMatrix {
    m.clone().remove_row(k).remove_column(k)
}

/// Sign-flips rows and columns: `diag(signs) · m · diag(signs)`.
pub fn sign_conjugate(m: &RMatrix, signs: &[f64]) -> RMatrix {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] *= signs[i] * signs[j];
        }
    }
    out
}
