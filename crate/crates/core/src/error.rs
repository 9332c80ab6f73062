use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands of a tensor operation disagree on alphabet or depth.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index out of range: {0}")]
    Index(String),

    /// Bad user-supplied data (empty streams, ragged rows, wrong dimension).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tags an error with the id of the stream that produced it.
    pub fn in_stream(self, id: &str) -> Self {
        match self {
            Error::Input(m) => Error::Input(format!("stream {id:?}: {m}")),
            Error::Config(m) => Error::Config(format!("stream {id:?}: {m}")),
            Error::Precondition(m) => Error::Precondition(format!("stream {id:?}: {m}")),
            other => other,
        }
    }
}
