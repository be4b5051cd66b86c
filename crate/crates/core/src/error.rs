//! Error type shared by the library and the command line front end.

use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong while loading data, training, or scoring.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input in {path}: {message}")]
    MalformedInput { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model file {path} is not usable: {message}")]
    BadModel { path: PathBuf, message: String },

    #[error("dataset is unusable: {0}")]
    BadDataset(String),

    #[error("degenerate component: {0}")]
    Degenerate(String),

    #[error("training failed: {0}")]
    Training(String),
}

impl Error {
    /// Process exit code the command line front end maps this error to.
    /// 3 covers unreadable or malformed inputs, 4 covers runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::MalformedInput { .. } | Error::BadModel { .. } => 3,
            Error::InvalidConfig(_)
            | Error::BadDataset(_)
            | Error::Degenerate(_)
            | Error::Training(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
