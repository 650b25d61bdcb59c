//! Experiment configuration from `--key value` flags and `key = value` files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::{LabError, LabResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Pair,
    NormCompare,
    RationalDemo,
    GapDivergence,
    BlaschkeCounterexample,
    LimitSweep,
    KernelSearch,
    SobolevCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Pair => "pair",
            Experiment::NormCompare => "norm_compare",
            Experiment::RationalDemo => "rational_demo",
            Experiment::GapDivergence => "gap_divergence",
            Experiment::BlaschkeCounterexample => "blaschke_counterexample",
            Experiment::LimitSweep => "limit_sweep",
            Experiment::KernelSearch => "kernel_search",
            Experiment::SobolevCheck => "sobolev_check",
        }
    }

    /// Parameter keys accepted besides `seed`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::Pair => &["phi", "N", "M", "show"],
            Experiment::NormCompare => &["phi", "f", "N", "M", "Ng", "rows", "cases", "tol"],
            Experiment::RationalDemo => &["phi", "f", "N", "pole_tol", "show"],
            Experiment::GapDivergence => &["poles", "K", "alpha", "N", "per_octave", "blocks"],
            Experiment::BlaschkeCounterexample => &["preset", "n_zeros", "c_exponent", "n0", "N"],
            Experiment::LimitSweep => &["phi", "f", "N", "levels", "Ng"],
            Experiment::KernelSearch => &["phi", "N", "Nf", "rows"],
            Experiment::SobolevCheck => &["cases", "degree", "s", "f", "p"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: BTreeMap<String, String>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Merges file entries with flag entries (flags win). `config`, `out`
    /// and `seed` are read from either place.
    pub fn from_sources(
        experiment: Experiment,
        flags: &[(String, String)],
        file: Option<&Path>,
    ) -> LabResult<Self> {
        let mut params = BTreeMap::new();
        let file_path = flags
            .iter()
            .rev()
            .find(|(k, _)| k == "config")
            .map(|(_, v)| PathBuf::from(v))
            .or_else(|| file.map(Path::to_path_buf));
        if let Some(path) = file_path {
            let text = std::fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
            for (k, v) in parse_config_file(&text)? {
                params.insert(k, v);
            }
        }
        for (k, v) in flags {
            if k != "config" {
                params.insert(k.clone(), v.clone());
            }
        }
        let output_dir = PathBuf::from(params.remove("out").unwrap_or_else(|| format!("out/{experiment}")));
        let seed = match params.remove("seed") {
            Some(s) => s.parse().map_err(|_| LabError::Config(format!("seed {s:?} is not an integer")))?,
            None => 0,
        };
        let allowed = experiment.keys();
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(LabError::Config(format!(
                "unknown key {k:?} for {experiment}; expected one of {}",
                allowed.join(", ")
            )));
        }
        let config = Self { experiment, params, output_dir, seed };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> LabResult<()> {
        for key in ["N", "M"] {
            if self.params.contains_key(key) {
                self.pow2(key, 1)?;
            }
        }
        for (k, v) in &self.params {
            if k.ends_with("tol") {
                let t: f64 = v.parse().map_err(|_| LabError::Config(format!("{k} = {v:?} is not a number")))?;
                if !(t > 0.0) {
                    return Err(LabError::Config(format!("{k} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> LabResult<&str> {
        self.text(key).ok_or_else(|| LabError::Config(format!("{} needs --{key}", self.experiment)))
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> LabResult<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| LabError::Config(format!("{key} = {v:?} does not parse as {}", std::any::type_name::<T>()))),
        }
    }

    /// A power of two, `default` when absent.
    pub fn pow2(&self, key: &str, default: usize) -> LabResult<usize> {
        let v: usize = self.get(key, default)?;
        if !v.is_power_of_two() {
            return Err(LabError::Config(format!("{key} = {v} must be a power of two")));
        }
        Ok(v)
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str, default: &[f64]) -> LabResult<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| LabError::Config(format!("{key}: {s:?} is not a number"))))
                .collect(),
        }
    }
}

/// `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> LabResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(LabError::Config(format!("line {}: expected key = value", i + 1)));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Pairs up `--key value` arguments.
pub fn parse_flags(args: &[String]) -> LabResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(key) = a.strip_prefix("--") else {
            return Err(LabError::Config(format!("expected --key, found {a:?}")));
        };
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            continue;
        }
        let Some(v) = it.next() else {
            return Err(LabError::Config(format!("--{key} needs a value")));
        };
        out.push((key.to_string(), v.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(v: &[&str]) -> Vec<(String, String)> {
        parse_flags(&v.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn flags_pair_up() {
        assert_eq!(
            flags(&["--N", "64", "--phi=poly:0,1"]),
            vec![("N".into(), "64".into()), ("phi".into(), "poly:0,1".into())]
        );
        assert!(parse_flags(&["--N".into()]).is_err());
        assert!(parse_flags(&["N".into(), "4".into()]).is_err());
    }

    #[test]
    fn file_entries_lose_to_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# pair run\nphi = poly:1\nN = 32\nseed = 7\n").unwrap();
        let cfg = ExperimentConfig::from_sources(Experiment::Pair, &flags(&["--N", "64"]), Some(&path)).unwrap();
        assert_eq!(cfg.text("phi"), Some("poly:1"));
        assert_eq!(cfg.pow2("N", 1).unwrap(), 64);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn validation() {
        let bad_n = ExperimentConfig::from_sources(Experiment::Pair, &flags(&["--N", "100"]), None);
        assert!(matches!(bad_n, Err(LabError::Config(_))));
        let bad_key = ExperimentConfig::from_sources(Experiment::Pair, &flags(&["--K", "3"]), None);
        assert!(matches!(bad_key, Err(LabError::Config(_))));
        let bad_tol = ExperimentConfig::from_sources(Experiment::NormCompare, &flags(&["--tol", "0"]), None);
        assert!(matches!(bad_tol, Err(LabError::Config(_))));
        assert!(parse_config_file("N 4").is_err());
    }
}
