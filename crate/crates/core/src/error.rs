use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("composition is nonzero at {location}: first bad column {column}")]
    NonzeroComposition { location: String, column: usize },

    #[error("algebra axiom violated: {0}")]
    Axiom(String),

    #[error("not a subcomplex in degree {degree}: {witness}")]
    NotSubcomplex { degree: usize, witness: String },

    #[error("not a chain map in degree {degree}: first bad column {column}")]
    NotChainMap { degree: usize, column: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("outside computed range: {0}")]
    Truncation(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error: 2 for bad input, 3 for refused work, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::InvalidField(_)
            | Error::Invalid(_)
            | Error::Axiom(_)
            | Error::Json(_)
            | Error::Dimension(_) => 2,
            Error::Resource(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
