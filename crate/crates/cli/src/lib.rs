//! Reproducible property sweeps over `povmrt-core`, plus the pieces of the `povmrt`
//! command-line tool that are worth testing without a process boundary.

pub mod config;
pub mod report;
pub mod suites;
pub mod sweep;

pub use config::{ExperimentConfig, IntRange, SuiteConfig};
pub use report::{Report, SuiteSummary, TrialRecord};
pub use suites::Suite;
pub use sweep::{run_sweep, run_sweep_with};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl SweepError {
    pub fn kind(&self) -> &'static str {
        match self {
            SweepError::Config(_) => "config",
            SweepError::Io(_) => "io",
        }
    }
}
