//! Experiment harness for the reactive receiver model: TOML configs in,
//! CSV curves, comparison reports and SVG charts out.

pub mod config;
pub mod error;
pub mod output;
pub mod render;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, Mode, Overrides, Resolved};
pub use error::CliError;
pub use report::ComparisonReport;
pub use run::{compare, run_single, run_sweep, Artifacts, Comparison};
