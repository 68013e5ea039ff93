use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid schedule parameters: {0}")]
    InvalidParams(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} is beyond the schedule (total length {total})")]
    OutOfRange { index: String, total: String },

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("ScheduleExhausted: {0}")]
    ScheduleExhausted(String),

    #[error("GridTooCoarse: {0}")]
    GridTooCoarse(String),

    #[error("unsupported vector: {0}")]
    UnsupportedVector(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
