use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar parameter lies outside its admissible range.
    #[error("{name} = {value} violates {bound}")]
    Domain {
        name: &'static str,
        value: String,
        bound: String,
    },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("{context} is not positive definite")]
    NotPositiveDefinite { context: String },

    #[error("{context} is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { context: String, asymmetry: f64 },

    #[error("orthant closed form supports p <= 3, got p = {0}; use orthant_prob instead")]
    UnsupportedDimension(usize),

    #[error("orthant dimension {0} exceeds the supported maximum of 64")]
    DimensionTooLarge(usize),

    #[error("outcome probability {0:e} is below the degeneracy threshold")]
    DegenerateOutcome(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no linear operating point: {0}")]
    NoLinearPoint(String),

    #[error("beta = {0} < 0 is outside the closed form's domain; use the general estimator")]
    NegativeBeta(f64),

    #[error("{0} is numerically singular")]
    Singular(&'static str),

    #[error("invalid one-bit word: {0}")]
    InvalidWord(String),
}

impl Error {
    /// True for failures of numerical origin. A covariance that is not
    /// positive definite is reported as invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::DegenerateOutcome(_) | Error::Singular(_))
    }

    pub(crate) fn domain(name: &'static str, value: impl ToString, bound: impl ToString) -> Self {
        Error::Domain {
            name,
            value: value.to_string(),
            bound: bound.to_string(),
        }
    }
}
