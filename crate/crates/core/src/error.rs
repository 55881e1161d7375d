use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time step {dt} violates the advective limit {limit}")]
    StabilityViolation { dt: f64, limit: f64 },

    #[error("blow-up at t={time}: norm {norm} exceeds {limit}")]
    BlowUp { time: f64, norm: f64, limit: f64 },

    #[error("fit needs at least {needed} samples inside the window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("series value {value} at t={time} is not positive")]
    NonPositiveValue { time: f64, value: f64 },

    #[error("ledger time {time} does not follow {last}")]
    NonMonotoneTime { time: f64, last: f64 },

    #[error("sample rejected: tail mass {tail} exceeds {limit}")]
    TailMass { tail: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("checkpoint format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
