//! Config loading and subcommands behind the `wickstat` binary.

use thiserror::Error;

pub mod commands;
pub mod config;

pub use commands::{run_subcommand, Command};
pub use config::{parse_config, SystemConfig};

/// Every failure the front end can report, each with its own exit code.
/// Exit code 1 is reserved for a check that ran and failed.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("config syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },

    #[error("config is missing the [{0}] section")]
    MissingSection(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("Fock precondition failed: {0}")]
    FockPrecondition(String),

    #[error("expression error: {0}")]
    Expression(String),

    #[error("engine error: {0}")]
    Engine(wickstat_core::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Syntax { .. } => 4,
            CliError::MissingSection(_) => 5,
            CliError::Shape(_) => 6,
            CliError::InvalidValue(_) => 7,
            CliError::FockPrecondition(_) => 8,
            CliError::Expression(_) => 9,
            CliError::Engine(_) => 10,
        }
    }
}

impl From<wickstat_core::Error> for CliError {
    fn from(e: wickstat_core::Error) -> Self {
        use wickstat_core::Error as E;
        match e {
            E::Shape(_) | E::DimensionMismatch { .. } => CliError::Shape(e.to_string()),
            E::InvalidTorsionOrder(_)
            | E::ZeroBicharacterValue { .. }
            | E::DuplicateGenerator(_)
            | E::PairingGrade { .. }
            | E::InvalidTolerance(_) => CliError::InvalidValue(e.to_string()),
            E::NotHermitian { .. } | E::NotStarTwist(_) | E::CutoffTooSmall(_) => CliError::FockPrecondition(e.to_string()),
            E::Parse { .. } | E::UnknownGenerator(_) | E::MixedStar(_) | E::NotNormal(_) => CliError::Expression(e.to_string()),
            other => CliError::Engine(other),
        }
    }
}
