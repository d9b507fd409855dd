use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The conditioning density of a bridge vanished or its series did not converge.
    #[error("degenerate bridge: {0}")]
    DegenerateBridge(String),

    #[error("Euler-Maruyama path exceeded {limit} steps")]
    StepLimit { limit: u64 },

    #[error("cannot parse expression at byte {position}: {message}")]
    Expression { position: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Expression { .. } => 2,
            Error::DegenerateBridge(_) | Error::StepLimit { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}
