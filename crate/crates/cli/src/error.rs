//! CLI error split: validation problems exit 1, runtime failures exit 2.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, config, or input files, caught before a stage runs.
    Validation(String),
    /// A stage failed mid-run; earlier artifacts stay intact.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn validation(err: impl fmt::Display) -> Self {
        CliError::Validation(err.to_string())
    }

    pub fn runtime(err: impl fmt::Display) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
