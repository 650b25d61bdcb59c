//! report.json and trace CSV files, each written through a temporary file
//! in the target directory and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use hb_core::counterexamples::{GROWTH_RATIO, POSITIVITY_TOLERANCE, RESOLUTION_LIMIT};
use hb_core::hardy::{DEFAULT_FLOOR, IDEMPOTENCE_MIN_MODULUS, PAIR_TOLERANCE};
use hb_core::norms::{
    CONVERGENCE_TOLERANCE, DIVERGENCE_RATIO, ROUNDOFF_MULTIPLE, SWEEP_GROWTH, SWEEP_TOLERANCE, TAIL_RATIO_LIMIT,
};
use hb_core::toeplitz::{CONDITION_LIMIT, GROWTH_FACTOR, MEMBER_TOLERANCE, TAIL_ENERGY_LIMIT, TAIL_FRACTION};
use hb_core::{Complex64, TaylorSeries};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};

pub const SCHEMA: u64 = 1;
pub const CRITERIA_VERSION: u64 = 1;

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn series(s: &TaylorSeries, show: usize) -> Value {
    Value::Array(s.coeffs().iter().take(show).map(|z| complex(*z)).collect())
}

/// The thresholds and rules every verdict in a report was taken under.
pub fn criteria() -> Value {
    json!({
        "version": CRITERIA_VERSION,
        "membership": {
            "member_residual": MEMBER_TOLERANCE,
            "condition_limit": CONDITION_LIMIT,
            "tail_fraction": TAIL_FRACTION,
            "tail_energy_limit": TAIL_ENERGY_LIMIT,
            "non_member_growth": GROWTH_FACTOR,
            "rule": "non_member if the norm estimate at 2Ng is at least twice that at Ng; member if the residual and g-tail limits hold; otherwise inconclusive",
        },
        "trace": {
            "divergence_ratio": DIVERGENCE_RATIO,
            "roundoff_multiple": ROUNDOFF_MULTIPLE,
            "convergence_tolerance": CONVERGENCE_TOLERANCE,
            "row_tail_ratio": TAIL_RATIO_LIMIT,
            "rule": "divergent if the last three dyadic block amplitudes each grow by divergence_ratio and exceed roundoff; converged if the last two blocks stay within the tolerance",
        },
        "sweep": {
            "tolerance": SWEEP_TOLERANCE,
            "growth": SWEEP_GROWTH,
            "rule": "converged if the last three G agree within tolerance; divergent if G grows by growth across each of the last three steps",
        },
        "pairs": {
            "unimodularity": PAIR_TOLERANCE,
            "outer_floor": DEFAULT_FLOOR,
            "idempotence_min_modulus": IDEMPOTENCE_MIN_MODULUS,
        },
        "certificate": {
            "growth_ratio": GROWTH_RATIO,
            "positivity_tolerance": POSITIVITY_TOLERANCE,
            "resolution_limit": RESOLUTION_LIMIT,
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub name: String,
    pub rows: Vec<(usize, Complex64, Option<f64>)>,
}

impl Trace {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), rows: Vec::new() }
    }

    pub fn push(&mut self, index: usize, value: Complex64, bound: Option<f64>) {
        self.rows.push((index, value, bound));
    }

    pub fn to_csv(&self) -> LabResult<Vec<u8>> {
        let with_bound = self.rows.iter().any(|r| r.2.is_some());
        let mut w = csv::Writer::from_writer(Vec::new());
        if with_bound {
            w.write_record(["index", "value_re", "value_im", "bound"])?;
        } else {
            w.write_record(["index", "value_re", "value_im"])?;
        }
        for (i, v, b) in &self.rows {
            let mut rec = vec![i.to_string(), v.re.to_string(), v.im.to_string()];
            if with_bound {
                rec.push(b.map(|x| x.to_string()).unwrap_or_default());
            }
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| LabError::io("csv buffer", e.into_error()))
    }
}

/// What an experiment produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub success: bool,
    pub summary: String,
    pub results: Value,
    pub traces: Vec<Trace>,
}

pub fn report(config: &ExperimentConfig, outcome: &Outcome) -> Value {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let traces: Vec<String> = outcome.traces.iter().map(|t| format!("{}.csv", t.name)).collect();
    json!({
        "schema": SCHEMA,
        "experiment": config.experiment.name(),
        "timestamp": timestamp,
        "seed": config.seed,
        "inputs": config.params,
        "criteria": criteria(),
        "results": outcome.results,
        "verdict": { "success": outcome.success, "summary": outcome.summary },
        "traces": traces,
    })
}

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> LabResult<PathBuf> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| LabError::io(tmp.path(), e))?;
    tmp.persist(&target).map_err(|e| LabError::io(&target, e.error))?;
    Ok(target)
}

/// Writes report.json and one CSV per trace into the output directory.
pub fn emit(config: &ExperimentConfig, outcome: &Outcome) -> LabResult<Vec<PathBuf>> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut written = Vec::new();
    for t in &outcome.traces {
        written.push(write_atomic(dir, &format!("{}.csv", t.name), &t.to_csv()?)?);
    }
    let mut text = serde_json::to_vec_pretty(&report(config, outcome))?;
    text.push(b'\n');
    written.push(write_atomic(dir, "report.json", &text)?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns() {
        let mut t = Trace::new("t");
        t.push(0, Complex64::new(1.5, -2.0), None);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "index,value_re,value_im\n0,1.5,-2\n");
        t.push(1, Complex64::new(0.0, 0.0), Some(0.25));
        assert_eq!(
            String::from_utf8(t.to_csv().unwrap()).unwrap(),
            "index,value_re,value_im,bound\n0,1.5,-2,\n1,0,0,0.25\n"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"one").unwrap();
        write_atomic(dir.path(), "a.txt", b"two").unwrap();
        assert_eq!(std::fs::read(dir.path().join("a.txt")).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
