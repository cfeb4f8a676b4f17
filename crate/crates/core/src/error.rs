use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature vectors must have at least one coordinate")]
    ZeroDimension,

    #[error("non-finite value at coordinate {index}")]
    NonFinite { index: usize },

    #[error("invalid label {0}: expected -1 or +1")]
    InvalidLabel(i64),

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("weight vector norm {norm} exceeds the unit ball")]
    OutsideUnitBall { norm: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
