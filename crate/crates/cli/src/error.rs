use hdivsym::FemError;
use thiserror::Error;

/// Failure of a subcommand, split by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.as_ref().display().to_string();
        move |source| CliError::Io { path, source }
    }
}

impl From<FemError> for CliError {
    fn from(e: FemError) -> Self {
        match e {
            FemError::Config(_)
            | FemError::CellBudget { .. }
            | FemError::Degree { .. }
            | FemError::DuplicateCell(_)
            | FemError::Degenerate { .. } => CliError::Config(e.to_string()),
            FemError::TermBlowup { .. } | FemError::Unisolvence { .. } | FemError::Singular { .. } | FemError::Eigen(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
