//! Batch experiments over the WSN simulator: config parsing, paired-seed
//! multi-trial runs, CSV/JSON results, and SVG charts.

pub mod chart;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::{parse_config, ExperimentSpec};
pub use error::{ExperimentError, Result};
pub use output::{emit_csv, parse_series_csv, series_csv};
pub use runner::{execute, run_experiment, write_outputs, ExperimentOutcome, Summary};
