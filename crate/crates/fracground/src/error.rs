use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("solver failed: {message}")]
    Solver {
        message: String,
        last_iterate: Option<Box<crate::grid::Field>>,
    },
    #[error("root bracket not found: {0}")]
    NoBracket(String),
    #[error("branch stopped: {0}")]
    Branch(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

impl Error {
    pub(crate) fn solver(message: impl Into<String>, last: Option<crate::grid::Field>) -> Self {
        Error::Solver {
            message: message.into(),
            last_iterate: last.map(Box::new),
        }
    }
}
