use thiserror::Error;

/// Errors raised by the chain, state and analysis builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("nothing to keep: partial trace needs at least one site")]
    NothingToKeep,

    #[error("site {site} out of range for a {n}-qubit register")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("Bloch parameters outside the ball by {violation:e}")]
    OutsideBlochBall { violation: f64 },

    #[error("density matrix invariant violated: {what} (deviation {deviation:e})")]
    InvariantViolation { what: &'static str, deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid chain parameter `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("inverse temperature must be non-negative, got {0}")]
    NegativeBeta(f64),

    #[error("noise amplitude must be non-negative, got {0}")]
    NegativeSigma(f64),

    #[error("measurement directions are singular (det {det:e})")]
    SingularDirections { det: f64 },

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("time grid is not strictly increasing at index {index}")]
    NonIncreasingGrid { index: usize },

    #[error("closed form available only for chains of length 3 and 4, got {0}")]
    UnsupportedClosedForm(usize),

    #[error("tolerance `{name}` must be positive, got {value}")]
    BadTolerance { name: &'static str, value: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
