//! Config-driven experiment runner for the finite log-gas toolkit.
//!
//! A run is a JSON config plus a seed. [`run::execute`] maps the config's
//! command onto a `loggas-core` pipeline and writes `results.csv`,
//! `manifest.json` and, for sampling commands, `samples.jsonl` into
//! `out/<config hash>`.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{assemble_config, parse_config, Command, DlrStatistic, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use output::{Check, Outcome, ResultRow, RunReport};
pub use run::{compute, execute};
