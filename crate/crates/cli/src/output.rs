use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use loggas_core::{MCEstimate, PointConfiguration, Window};

/// One CSV row: a test at a parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub test: String,
    pub n: usize,
    pub beta: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub param: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub pass: bool,
}

impl ResultRow {
    pub fn new(test: &str, cfg: &ExperimentConfig, window: &Window, param: f64) -> Self {
        Self {
            test: test.to_string(),
            n: cfg.n,
            beta: cfg.beta,
            window_lo: window.lo(),
            window_hi: window.hi(),
            param,
            mean: 0.0,
            std_error: 0.0,
            n_samples: 0,
            pass: true,
        }
    }

    pub fn estimate(mut self, e: &MCEstimate) -> Self {
        self.mean = e.mean;
        self.std_error = e.std_error;
        self.n_samples = e.n_samples;
        self
    }

    pub fn value(mut self, mean: f64, std_error: f64, n_samples: usize) -> Self {
        self.mean = mean;
        self.std_error = std_error;
        self.n_samples = n_samples;
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}

/// A named acceptance decision recorded in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

/// Everything a command produces before it is written to disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub checks: Vec<Check>,
    pub samples: Option<Vec<PointConfiguration>>,
    /// Command-specific manifest entries, written under `run`.
    pub run: serde_json::Map<String, serde_json::Value>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub dir: PathBuf,
    pub pass: bool,
    pub checks: Vec<Check>,
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `out/<hash>`, refusing to reuse an existing run directory.
pub fn create_run_dir(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    fs::create_dir_all(&cfg.out)?;
    let dir = cfg.out.join(cfg.hash());
    match fs::create_dir(&dir) {
        Ok(()) => Ok(dir),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::RunExists(dir)),
        Err(e) => Err(e.into()),
    }
}

pub fn write_run(dir: &Path, cfg: &ExperimentConfig, outcome: &Outcome, wall_time: f64) -> CliResult<()> {
    write_csv(&dir.join("results.csv"), &outcome.rows)?;
    if let Some(samples) = &outcome.samples {
        let mut w = BufWriter::new(fs::File::create(dir.join("samples.jsonl"))?);
        loggas_core::config::write_jsonl(&mut w, samples)?;
        w.flush()?;
    }
    let manifest = json!({
        "config_hash": cfg.hash(),
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "versions": {
            "loggas-dlr": env!("CARGO_PKG_VERSION"),
            "loggas-core": loggas_core::VERSION,
        },
        "wall_time": wall_time,
        "pass": outcome.pass(),
        "checks": outcome.checks,
        "run": outcome.run,
        "config": cfg.effective(),
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}
