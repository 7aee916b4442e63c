// SPDX-License-Identifier: Apache-2.0

use std::fmt::Display;
use std::path::Path;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        })
    }

    pub fn input(path: &Path, e: impl Display) -> CliError {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    /// Failure to write under the output directory.
    pub fn output(path: &Path, e: impl Display) -> CliError {
        CliError::Input(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<synflow::agent::AgentError> for CliError {
    fn from(e: synflow::agent::AgentError) -> CliError {
        CliError::Internal(e.to_string())
    }
}

impl From<synflow::env::EnvError> for CliError {
    fn from(e: synflow::env::EnvError) -> CliError {
        match e {
            synflow::env::EnvError::Config(msg) => CliError::Input(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
