use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Input { field: String, message: String },
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Invariant(String),
    #[error("interrupted after {done} of {total} items")]
    Interrupted { done: usize, total: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(field: impl Into<String>, message: impl ToString) -> Self {
        Self::Input {
            field: field.into(),
            message: message.to_string(),
        }
    }

    /// Wraps a library error raised while handling `field`.
    pub fn core(field: impl Into<String>, e: tandem_core::Error) -> Self {
        match e {
            tandem_core::Error::CapExceeded { .. } => Self::Cap(e.to_string()),
            other => Self::input(field, other),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input { .. } => 2,
            Self::Cap(_) => 3,
            Self::Invariant(_) => 4,
            Self::Interrupted { .. } => 130,
            Self::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
