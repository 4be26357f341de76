//! Error taxonomy shared across the crate.
//!
//! The variants map onto the process exit codes of the `heisrect` binary:
//! bound/invariant violations exit 1, configuration and usage problems
//! exit 2, numerical failures (non-convergence, non-finite intermediates)
//! exit 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A quantitative bound or structural invariant failed during a run.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Bad configuration or call outside an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// Numerical failure: NaN/Inf intermediates, blow-up, non-convergence.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 1,
            Error::Usage(_) | Error::Io(_) | Error::Config(_) => 2,
            Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
