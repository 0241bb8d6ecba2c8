use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("interior margin must be positive, got {0}")]
    NonPositiveMargin(f64),

    /// An iterative solver hit its iteration cap. `best` is the last iterate.
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        best: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("vector is not in the cone (violation {violation:e})")]
    NotInCone { violation: f64 },

    #[error("method `{method}` is not applicable: {reason}")]
    MethodNotApplicable { method: &'static str, reason: String },

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid cone metric: {0}")]
    InvalidConeMetric(String),

    #[error("coefficient out of range: {0}")]
    CoefficientOutOfRange(String),

    #[error("map is not a self map: {0}")]
    NotSelfMap(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("hypothesis check failed: {0}")]
    HypothesisFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
