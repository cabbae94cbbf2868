use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use loggas_core::sampler::Schedule;
use loggas_core::{GasParams, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    #[default]
    Sample,
    Resample,
    VerifyDlr,
    VerifyIdentity,
    Partition,
    StatsDiscrepancy,
    StatsRigidity,
    StatsCampbell,
    Truncation,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Sample,
        Command::Resample,
        Command::VerifyDlr,
        Command::VerifyIdentity,
        Command::Partition,
        Command::StatsDiscrepancy,
        Command::StatsRigidity,
        Command::StatsCampbell,
        Command::Truncation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Resample => "resample",
            Command::VerifyDlr => "verify-dlr",
            Command::VerifyIdentity => "verify-identity",
            Command::Partition => "partition",
            Command::StatsDiscrepancy => "stats-discrepancy",
            Command::StatsRigidity => "stats-rigidity",
            Command::StatsCampbell => "stats-campbell",
            Command::Truncation => "truncation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DlrStatistic {
    Constant,
    Count,
    Smooth,
}

/// Every knob of every command. Keys not used by a command are ignored by it
/// but still take part in the run hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: usize,
    pub beta: f64,
    pub seed: u64,
    pub workers: usize,
    pub chains: usize,
    /// Emitted states per chain.
    pub samples: u64,
    /// Defaults to `10·n·1000` proposals.
    pub burn_in: Option<u64>,
    /// Defaults to `n` proposals.
    pub thin: Option<u64>,
    pub inner: Window,
    /// Defaults to `n/2`, the whole circle.
    pub outer_radius: Option<f64>,
    pub statistics: Vec<DlrStatistic>,
    pub k_inner: usize,
    pub kernel_steps: Option<u64>,
    pub max_std_error: f64,
    pub instances: usize,
    pub max_interior: usize,
    pub tolerance: f64,
    pub rel_tol: f64,
    /// Window lengths for discrepancy statistics, centered at 0.
    pub lengths: Vec<f64>,
    pub bound_factor: f64,
    pub nonincreasing_from: f64,
    /// Copies of each sample rotated by multiples of `n / rotations`.
    pub rotations: usize,
    pub window: Window,
    pub scales: Vec<f64>,
    pub radii: Vec<f64>,
    pub delta: f64,
    pub trial_count: usize,
    pub min_fraction: f64,
    pub campbell_domain: Window,
    pub campbell_support: Window,
    pub se_threshold: f64,
    /// JSONL configurations consumed by `resample` instead of fresh samples.
    pub input: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let w = |lo, hi| Window::new(lo, hi).expect("static window");
        Self {
            command: Command::Sample,
            n: 16,
            beta: 2.0,
            seed: 0,
            workers: 1,
            chains: 1,
            samples: 1000,
            burn_in: None,
            thin: None,
            inner: w(-1.0, 1.0),
            outer_radius: None,
            statistics: vec![DlrStatistic::Constant, DlrStatistic::Count, DlrStatistic::Smooth],
            k_inner: 4,
            kernel_steps: None,
            max_std_error: 0.01,
            instances: 1000,
            max_interior: 5,
            tolerance: 1e-9,
            rel_tol: 1e-4,
            lengths: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            bound_factor: 1.5,
            nonincreasing_from: 4.0,
            rotations: 1,
            window: w(-4.0, 4.0),
            scales: vec![1.0, 2.0, 4.0, 8.0],
            radii: vec![16.0, 32.0, 64.0, 128.0],
            delta: 0.1,
            trial_count: 24,
            min_fraction: 0.9,
            campbell_domain: w(-3.0, 4.0),
            campbell_support: w(0.0, 1.0),
            se_threshold: 3.0,
            input: None,
            out: PathBuf::from("out"),
        }
    }
}

/// Keys that never change results and are left out of the run hash.
const UNHASHED: [&str; 2] = ["workers", "out"];

fn known_keys() -> Vec<String> {
    match serde_json::to_value(ExperimentConfig::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => unreachable!("config serializes to an object"),
    }
}

/// Parses JSON text into a raw object, reporting syntax errors by position.
pub fn parse_object(source: &str) -> CliResult<Map<String, Value>> {
    let v: Value = serde_json::from_str(source).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Parse {
            line: 1,
            column: 1,
            message: "config must be a JSON object".into(),
        }),
    }
}

/// Parses and validates a config document; missing keys take defaults.
pub fn parse_config(source: &str) -> CliResult<ExperimentConfig> {
    from_object(parse_object(source)?)
}

pub fn from_object(obj: Map<String, Value>) -> CliResult<ExperimentConfig> {
    let known = known_keys();
    if let Some(k) = obj.keys().find(|k| !known.contains(k)) {
        return Err(CliError::validation(k, "unknown key"));
    }
    if !obj.contains_key("command") {
        return Err(CliError::validation("command", "missing"));
    }
    let cfg: ExperimentConfig = serde_json::from_value(Value::Object(obj.clone())).map_err(|e| {
        // locate the offending key by decoding each one on its own
        let field = obj
            .iter()
            .find(|(k, v)| {
                let one = Map::from_iter([((*k).clone(), (*v).clone())]);
                serde_json::from_value::<ExperimentConfig>(Value::Object(one)).is_err()
            })
            .map_or_else(String::new, |(k, _)| k.clone());
        CliError::validation(&field, e.to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Builds a config from an optional JSON document, then `overrides` in
/// order, then the command itself. Later sources win.
pub fn assemble_config(
    command: Command,
    source: Option<&str>,
    overrides: impl IntoIterator<Item = (String, Value)>,
) -> CliResult<ExperimentConfig> {
    let mut obj = match source {
        Some(text) => parse_object(text)?,
        None => Map::new(),
    };
    obj.extend(overrides);
    obj.insert("command".into(), serde_json::to_value(command)?);
    from_object(obj)
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |f: &str, m: &str| Err(CliError::validation(f, m));
        if self.n < 1 {
            return bad("n", "n must be at least 1");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta", "beta must be positive");
        }
        if self.workers < 1 {
            return bad("workers", "need at least one worker");
        }
        if self.chains < 1 {
            return bad("chains", "need at least one chain");
        }
        if self.samples < 1 {
            return bad("samples", "need at least one sample");
        }
        if self.thin == Some(0) {
            return bad("thin", "thin must be at least 1");
        }
        if self.k_inner < 1 {
            return bad("k_inner", "need at least one kernel resample");
        }
        if self.rotations < 1 {
            return bad("rotations", "rotations must be at least 1");
        }
        if self.lengths.is_empty() || self.lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return bad("lengths", "window lengths must be positive");
        }
        if self.scales.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return bad("scales", "scales must be nonnegative");
        }
        if self.radii.is_empty() || self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return bad("radii", "radii must be nonempty and strictly increasing");
        }
        if !(self.delta > 0.0) {
            return bad("delta", "delta must be positive");
        }
        if self.trial_count < 1 {
            return bad("trial_count", "need at least one trial");
        }
        if !(self.se_threshold > 0.0) {
            return bad("se_threshold", "threshold must be positive");
        }
        if let Some(r) = self.outer_radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad("outer_radius", "radius must be positive");
            }
        }
        Ok(())
    }

    pub fn params(&self) -> CliResult<GasParams> {
        Ok(GasParams::new(self.n, self.beta)?)
    }

    pub fn schedule(&self) -> CliResult<Schedule> {
        let n = self.n as u64;
        let burn_in = self.burn_in.unwrap_or(10 * n * 1000);
        let thin = self.thin.unwrap_or(n);
        Ok(Schedule::new(burn_in + self.samples * thin, burn_in, thin)?)
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius.unwrap_or(self.n as f64 / 2.0)
    }

    /// The config with defaults filled, as written to the manifest.
    pub fn effective(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    /// SHA-256 of the canonical JSON of all result-relevant keys.
    pub fn hash(&self) -> String {
        let mut v = self.effective();
        if let Value::Object(m) = &mut v {
            for k in UNHASHED {
                m.remove(k);
            }
        }
        // serde_json maps are sorted, so this text is canonical
        let text = serde_json::to_string(&v).expect("serializable");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
