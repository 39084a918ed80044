use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),

    #[error("{0}")]
    Analysis(domargin::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Self::Parse { line, msg: msg.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Parse { .. } | CliError::Invalid(_) => 2,
            CliError::Analysis(domargin::Error::InertiaMismatch { .. }) => 4,
            CliError::Analysis(_) | CliError::Io { .. } => 3,
        })
    }
}

impl From<domargin::Error> for CliError {
    fn from(e: domargin::Error) -> Self {
        CliError::Analysis(e)
    }
}
