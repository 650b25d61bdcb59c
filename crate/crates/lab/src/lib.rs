//! Experiment runner on top of `hb-core`: text formats for series and
//! poles, `key = value` configuration, JSON reports and CSV traces.
//!
//! ```text
//! hb-lab <experiment> [--key value]... [--config path] [--out dir]
//! ```

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod parse;

pub use config::{Experiment, ExperimentConfig};
pub use error::{LabError, LabResult};
pub use output::Outcome;
pub use parse::{parse_poles, parse_series, Preset, SeriesSpec};

/// Runs the experiment and writes its files; `Ok(true)` when the verdict succeeded.
pub fn run(config: &ExperimentConfig) -> LabResult<bool> {
    let outcome = experiments::run(config)?;
    output::emit(config, &outcome)?;
    log::info!("{}: {}", config.experiment, outcome.summary);
    Ok(outcome.success)
}
