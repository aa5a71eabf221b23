use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys or inputs that do not belong to the config.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// A numerical stage failed; `stage` says where.
    #[error("{stage}: {source}")]
    Numerical { stage: String, source: rmt_core::Error },
    #[error("invariant breach: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Config errors from the core are usage errors; everything else is numerical.
    pub fn stage(stage: impl Into<String>) -> impl FnOnce(rmt_core::Error) -> CliError {
        let stage = stage.into();
        move |source| match source {
            rmt_core::Error::Config(msg) => CliError::Usage(format!("{stage}: {msg}")),
            source => CliError::Numerical { stage, source },
        }
    }
}
