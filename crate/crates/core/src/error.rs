use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("weight {weight} is not a nonnegative integer; exact dilatation is unavailable")]
    InexactPower { weight: String },

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("nilpotency step {step} exceeds the supported maximum {max}")]
    StepTooLarge { step: usize, max: usize },

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("no-contraction: dilatation factor is 1, fixed point may not exist or be non-unique")]
    NoContraction,

    #[error("fixed-point iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NotConverged { iterations: usize, last_step: f64 },

    #[error("calibration-failed: subadditivity still violated after {steps} shrink steps")]
    CalibrationFailed { steps: usize },

    #[error("parameter `{name}` out of range: {reason}")]
    OutOfRange { name: &'static str, reason: String },

    #[error("point coincides with the deleted point")]
    DeletedPoint,

    #[error("no recurrence found within horizon {horizon}")]
    NoRecurrence { horizon: usize },

    #[error("unknown catalog group `{0}`")]
    UnknownGroup(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn out_of_range(name: &'static str, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            reason: reason.into(),
        }
    }
}
