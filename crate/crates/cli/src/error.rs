use std::fmt;
use std::path::Path;

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unparsable input or config.
    Invalid(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn invalid(e: impl fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<devassist_core::config::ConfigError> for CliError {
    fn from(e: devassist_core::config::ConfigError) -> Self {
        match e {
            devassist_core::config::ConfigError::Io(io) => CliError::Io(format!("config: {io}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<devassist_core::index::IndexError> for CliError {
    fn from(e: devassist_core::index::IndexError) -> Self {
        match e {
            devassist_core::index::IndexError::Io(io) => CliError::Io(format!("index: {io}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Findings reported or work partially skipped.
    Degraded,
}
