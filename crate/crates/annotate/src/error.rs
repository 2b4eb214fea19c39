use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),
    #[error("text to annotate is empty")]
    EmptyText,
    #[error("environment variable {var} is not set (needed for {provider})")]
    MissingCredentials { var: String, provider: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache entry {path}: {message}")]
    Cache { path: PathBuf, message: String },
    #[error("request for unit `{unit_id}` failed after {attempts} attempt(s): {message}")]
    Transport {
        unit_id: String,
        attempts: usize,
        message: String,
    },
    #[error("writing annotations: {0}")]
    Export(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::MissingCredentials { .. })
    }
}

/// Why a reply did not yield a valid answer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseFailure {
    #[error("no standalone integer in reply")]
    NoInteger,
    #[error("answer {0} outside the allowed range")]
    OutOfRange(String),
}
