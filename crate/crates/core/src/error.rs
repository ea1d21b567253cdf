use alloc::string::String;

/// Errors raised by operator validation and the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} exceeds the configured maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("operator is not full rank (min eigenvalue {0:e})")]
    NotFullRank(f64),

    #[error("support violation: the quantity is +infinity")]
    SupportViolation,

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("channel is not trace preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("channel is not completely positive (min Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("channel is not covariant (residual {0:e})")]
    NotCovariant(f64),

    #[error("quadrature weights sum to {0}, expected 1")]
    QuadratureNormalization(f64),

    #[error("metric `{0}` has no integral representation")]
    MissingDensity(String),

    #[error("metric gap {0:e} is negative beyond tolerance")]
    NegativeGap(f64),

    #[error("unknown metric name `{0}`")]
    UnknownMetric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
