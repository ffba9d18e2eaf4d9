use std::fmt;

/// CLI failure classes, mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or usage (exit 1).
    Validation(String),
    /// A constraint-verification check failed (exit 2).
    Verification(String),
    /// Internal numerical or IO failure (exit 3).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

impl From<reap_core::Error> for CliError {
    fn from(e: reap_core::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
