//! File formats, ensemble persistence, parallel drivers and the `mfpce`
//! command-line tool on top of [`mfpce_core`].

pub mod ensemble;
pub mod io;
pub mod lf_spec;
pub mod parallel;

pub use mfpce_core as core;

/// Errors surfaced by the std layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] mfpce_core::Error),
}

impl Error {
    /// Problems with the invocation or its input files, as opposed to
    /// numerical or modelling failures.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Model(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
