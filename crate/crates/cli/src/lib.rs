//! Command implementations behind the `netpass` binary.
//!
//! Every command returns a [`Outcome`]: a JSON report for stdout, the files it
//! wrote and an [`ExitStatus`]. The binary only parses flags and prints.

pub mod commands;
pub mod output;
pub mod scenario;

use thiserror::Error;

pub use commands::{analyze_graph, audit, prop_suite, simulate, GraphSource, Outcome, RunOptions};
pub use scenario::Scenario;

pub const TOOL_VERSION: &str = concat!("netpass ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Diverged = 1,
    InputError = 2,
    Counterexample = 3,
    /// A dissipation audit found a sample outside tolerance.
    AuditViolation = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
}
