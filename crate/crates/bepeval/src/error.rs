use thiserror::Error;

/// Errors produced by construction, parsing, and mask operations.
///
/// Scoring and matching on already-validated inputs are infallible; every
/// fallible path funnels through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid box (x={x}, y={y}, w={w}, h={h}): {reason}")]
    InvalidBox {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        reason: &'static str,
    },

    #[error("mask bit buffer holds {got} bits, expected {width}x{height}={expected}")]
    MaskLengthMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },

    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    MaskDimensionMismatch(usize, usize, usize, usize),

    #[error("ground-truth mask has no foreground pixels")]
    EmptyGroundTruthMask,

    #[error("unknown metric '{0}'")]
    UnknownMetric(String),

    #[error("invalid criterion '{0}': {1}")]
    InvalidCriterion(String, String),

    #[error("threshold {value} must lie in [0, 1]")]
    ThresholdOutOfRange { value: f64 },

    #[error("dual thresholds require a bottom-edge proximity metric, got '{0}'")]
    DualRequiresBep(String),

    #[error("{source_name}:{line}: {message}")]
    Annotation {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
