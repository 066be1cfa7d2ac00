//! Configuration, reports and the command implementations behind the `dopt` binary.
//!
//! Exit codes: 0 success, 1 run finished but failed its convergence or
//! validation test, 2 configuration or input error, 3 degenerate design.

pub mod commands;
pub mod config;
pub mod format;
pub mod report;

use thiserror::Error;

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CERTIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("report error: {0}")]
    Report(String),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Solver(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(
                Error::DegenerateDesign { .. }
                | Error::TooFewCandidates { .. }
                | Error::EmptyCandidateSet
                | Error::NotPositiveDefinite { .. }
                | Error::NotAnEllipsoid(_),
            ) => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
