use std::path::PathBuf;

use squeeze_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad config document or value; the message already carries the location.
    #[error("{0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Csv {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical non-convergence, 1 when output cannot be written.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if is_numerical(e) => 3,
            CliError::NotConverged(_) => 3,
            CliError::Write { .. } => 1,
            _ => 2,
        }
    }
}

fn is_numerical(e: &CoreError) -> bool {
    match e {
        CoreError::Quadrature { .. } => true,
        CoreError::AtDelay { source, .. } => is_numerical(source),
        _ => false,
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
