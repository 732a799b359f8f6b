use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Rejected before any work started.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<covering_core::Error> for CliError {
    fn from(e: covering_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
