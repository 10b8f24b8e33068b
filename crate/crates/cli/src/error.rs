use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<logshot::Error> for CliError {
    fn from(e: logshot::Error) -> Self {
        use logshot::Error::*;
        match e {
            Domain(_) | Grid(_) | Unsupported(_) => CliError::Validation(e.to_string()),
            Accuracy(_) | Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
