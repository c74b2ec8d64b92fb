//! Configuration, experiment suites and report files for `kelab`.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;
pub mod svg;

pub use config::{ExperimentConfig, Suite};
pub use error::{CliError, Result};
pub use report::{run_config, write_outputs, RunOutcome};
pub use suites::{Check, SuiteOutput};
