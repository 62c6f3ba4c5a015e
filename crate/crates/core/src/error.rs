use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("pattern support must be non-empty")]
    EmptySupport,
    #[error("point {0} outside the allowed region")]
    PointOutside(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("window out of range: {0}")]
    WindowOutOfRange(String),
    #[error("marker spacing is not an exact power: {0}")]
    NonPowerSpacing(String),
    #[error("entry length {entry} exceeds rectangle width {width}")]
    EntryExceedsWidth { entry: u64, width: u64 },
    #[error("resource ceiling hit: {0}")]
    ResourceLimit(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
