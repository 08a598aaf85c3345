//! Experiment runner for the FaMSeC indicators: built-in networks, the
//! synthetic and simulation experiments, and report assembly for the
//! `famsec` command-line tool.

pub mod commands;
pub mod error;
pub mod experiments;
pub mod networks;
pub mod quadrature;
pub mod report;

pub use error::HarnessError;
pub use experiments::{run_experiment, ExperimentId, RunOptions};
pub use report::{Output, Report, Table};
