use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("property violation: {0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Violation(_) => 4,
        }
    }
}

impl From<entgap::Error> for CliError {
    fn from(e: entgap::Error) -> Self {
        match e {
            entgap::Error::CarryCap { .. } | entgap::Error::NoConvergence { .. } => {
                CliError::Violation(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
