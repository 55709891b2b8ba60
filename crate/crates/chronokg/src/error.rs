//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the pipeline, stores, and evaluation harnesses.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on domain values was violated (ages out of bounds,
    /// malformed identifiers, degenerate inputs).
    #[error("domain error: {0}")]
    Domain(String),

    /// An entity (disease, document, store record) could not be found.
    #[error("not found: {0}")]
    NotFound(String),

    /// A network-facing source failed. Carries whether a retry is sensible.
    #[error("transport error: {message}{}", if *.retryable { " (retryable)" } else { "" })]
    Transport { message: String, retryable: bool },

    /// A model provider timed out.
    #[error("provider timeout after {seconds}s: {provider}")]
    Timeout { provider: String, seconds: u64 },

    /// The replay provider had no recorded response for a prompt.
    #[error("replay cache miss for provider {provider}: {key}")]
    ReplayMiss { provider: String, key: String },

    /// A data file failed to parse. `line` is 1-based when known.
    #[error("parse error in {path}{}: {message}", .line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    /// Configuration file missing or invalid.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn not_found(msg: impl Into<String>) -> Self {
        Error::NotFound(msg.into())
    }

    pub fn transport(msg: impl Into<String>, retryable: bool) -> Self {
        Error::Transport {
            message: msg.into(),
            retryable,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(path: impl Into<PathBuf>, line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: msg.into(),
        }
    }
}
