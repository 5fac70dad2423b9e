//! Experiment harness around `pslab-core`: run configuration, parallel
//! drivers, CSV/JSON reports and the verification suites behind the `pslab`
//! binary.

pub mod config;
pub mod exec;
pub mod report;
pub mod verify;

pub use config::{CliError, RunConfig};
