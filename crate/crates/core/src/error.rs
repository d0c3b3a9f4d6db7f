use thiserror::Error;

pub type Result<T, E = QifError> = std::result::Result<T, E>;

/// Errors raised while building inputs or evaluating measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QifError {
    #[error("empty {0}")]
    Empty(&'static str),

    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("row {row} of channel is not a distribution: {reason}")]
    NotStochastic { row: usize, reason: String },

    #[error("parameter {name} = {value} outside {allowed}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("invalid gain function: {0}")]
    InvalidGain(String),

    #[error("gain value {value} outside the domain of {mean}")]
    DomainViolation { value: f64, mean: String },

    #[error("mean function {0} does not have a convex inverse")]
    NonConvexInverse(String),

    #[error("posterior mean {0} must be affine, convex increasing or concave decreasing")]
    InvalidMeanClass(String),

    #[error("mean function {0} does not have a multiplicative inverse")]
    NotMultiplicative(String),

    #[error("mean function {0} is a limit and has no pointwise forward/inverse")]
    LimitMean(String),

    #[error("expected gain must be non-negative, got {0}")]
    NegativeVulnerability(f64),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("parse error: {0}")]
    Parse(String),
}
