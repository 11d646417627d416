//! IO, experiment harness and command line for `irgcouple-core`.

pub mod canonical;
pub mod clock;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use experiments::{run_experiment, verify_report};
pub use report::ExperimentReport;
