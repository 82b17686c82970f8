use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeqsenseError {
    #[error(transparent)]
    Core(#[from] seqsense_core::Error),
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SeqsenseError>;

pub(crate) fn config_err(path: &str, message: impl Into<String>) -> SeqsenseError {
    SeqsenseError::Config { path: path.to_string(), message: message.into() }
}
