use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not a supported prime (2, 3, 5, 7, 11 or 13)")]
    UnsupportedModulus(u8),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("modulus mismatch: {lhs} vs {rhs}")]
    ModulusMismatch { lhs: u8, rhs: u8 },

    #[error("subspace is not self-orthogonal under the symplectic form")]
    NotSelfOrthogonal,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distribution not normalized: total probability {0}")]
    NotNormalized(f64),

    #[error("negative probability {0} at label {1}")]
    NegativeProbability(f64, String),

    #[error("matrix is not completely positive: eigenvalue {0}")]
    NotCompletelyPositive(f64),

    #[error("matrix is not Hermitian: defect {0}")]
    NotHermitian(f64),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("malformed correctable set: {x} and {y} lie in the same dual coset")]
    MalformedCorrectableSet { x: String, y: String },

    #[error("dimension guard: d^(2n) = {0} exceeds limit {1} (set SYMPCODE_MAX_DIM to raise)")]
    DimensionGuard(usize, usize),

    #[error("accept set is empty")]
    EmptyAcceptSet,

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("internal: {0}")]
    Internal(String),

    #[error("format: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
