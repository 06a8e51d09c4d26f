use num_bigint::BigInt;
use thiserror::Error;

/// Failures reported by the library.
///
/// `is_usage` separates malformed input text from domain failures (valid
/// input violating a precondition).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    Parse(String),
    #[error("constant coefficient is zero")]
    ZeroConstant,
    #[error("polynomial is not primitive (content {0})")]
    NotPrimitive(BigInt),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("root isolation did not converge within {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },
    #[error("eps {requested} is below the constructive bound {required}")]
    EpsilonTooSmall { requested: f64, required: f64 },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("certificate violation: {0}")]
    Certificate(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse(_))
    }

    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::ZeroConstant => "zero_constant",
            Error::NotPrimitive(_) => "not_primitive",
            Error::NotPrime(_) => "not_prime",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::DegreeMismatch(_) => "degree_mismatch",
            Error::Singular => "singular",
            Error::PrecisionExhausted { .. } => "precision_exhausted",
            Error::EpsilonTooSmall { .. } => "epsilon_too_small",
            Error::Numeric(_) => "numeric",
            Error::Certificate(_) => "certificate",
            Error::Inconsistent(_) => "inconsistent",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
