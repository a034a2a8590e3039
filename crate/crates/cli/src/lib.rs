//! Command-line pipelines over the forecasting core: configuration,
//! end-to-end runs, the sector model suite and report emission.

pub mod cli;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod suite;
pub mod svg;

pub use error::{CliError, Result};
pub use pipeline::{execute, run_config, FittedModel, Inputs, RunResult};
pub use report::ForecastReport;
