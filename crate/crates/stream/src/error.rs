//! Error type for the streaming components.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("broker startup failed: {0}")]
    Startup(String),

    /// Connection-level failure; retrying against the same broker is legal.
    #[error("transport error (retriable): {0}")]
    Transport(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    /// The broker refused the request (e.g. oversized message).
    #[error("broker rejected request: {0}")]
    Rejected(String),

    #[error("sink write failed: {0}")]
    Sink(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] vistream_core::Error),

    #[error("pipeline config: {0}")]
    Config(String),
}

impl Error {
    /// True for failures where reconnecting and retrying can succeed.
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Transport(_))
    }
}
