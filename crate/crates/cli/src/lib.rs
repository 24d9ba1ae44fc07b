//! Verification suites and single-shot commands over `choquet_core`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! configuration or I/O problems.

pub mod commands;
pub mod fixtures;
pub mod models;
pub mod report;
pub mod suites;

pub use report::{Check, Report, SuiteResult};
pub use suites::{run_suite, SuiteConfig, SuiteId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}
