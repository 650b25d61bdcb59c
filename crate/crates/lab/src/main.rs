use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hb_lab::config::parse_flags;
use hb_lab::{Experiment, ExperimentConfig, LabError};

/// Runs one experiment and writes report.json plus trace CSVs.
///
/// Parameters are `--key value` pairs (see the README for each experiment's
/// keys). A `--config` file holds `key = value` lines; flags override it.
/// HB_LAB_THREADS caps the worker threads.
#[derive(Parser, Debug)]
#[command(name = "hb-lab", version)]
struct Cli {
    experiment: Experiment,
    /// `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment parameters as `--key value`, including `--out dir` and `--seed n`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--key value")]
    params: Vec<String>,
}

fn threads() -> Result<(), LabError> {
    let Ok(v) = std::env::var("HB_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| LabError::Config(format!("HB_LAB_THREADS = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::Config(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = threads()
        .and_then(|_| parse_flags(&cli.params))
        .and_then(|flags| ExperimentConfig::from_sources(cli.experiment, &flags, cli.config.as_deref()))
        .and_then(|config| hb_lab::run(&config));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("hb-lab: {}", e.to_string().replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
