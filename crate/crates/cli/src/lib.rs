//! Command layer for the `dtigraph` binary. Commands compute every output in
//! memory first and only then write the run directory, so a failed run
//! leaves nothing behind.

pub mod commands;
pub mod config;
mod data;
mod output;

pub use commands::{run, Command, Query};
pub use config::{Overrides, RunConfig};
pub use output::Outputs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input files, identifiers or configuration.
    #[error("input error: {0}")]
    Input(String),
    /// Divergence or a numerical breakdown.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Failure writing the run directory.
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl From<dtigraph::Error> for CliError {
    fn from(e: dtigraph::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}
