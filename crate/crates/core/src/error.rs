use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} in {context}")]
    NonFinite { context: String, value: f64 },

    #[error("zero vector for label `{label}`")]
    ZeroVector { label: String },

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("at least {min} labels required, found {found}")]
    TooFewLabels { min: usize, found: usize },

    #[error("label index {index} out of range for {k} labels")]
    LabelIndex { index: usize, k: usize },

    #[error("antipodal construction undefined for equal vectors")]
    EqualVectors,

    #[error("label sets differ between models")]
    LabelMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("linear program indeterminate: {0}")]
    Indeterminate(String),

    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}
