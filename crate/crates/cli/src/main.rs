use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::Value;

use loggas_dlr::{assemble_config, execute, CliError, CliResult, Command};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
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

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Sample => Command::Sample,
            Cmd::Resample => Command::Resample,
            Cmd::VerifyDlr => Command::VerifyDlr,
            Cmd::VerifyIdentity => Command::VerifyIdentity,
            Cmd::Partition => Command::Partition,
            Cmd::StatsDiscrepancy => Command::StatsDiscrepancy,
            Cmd::StatsRigidity => Command::StatsRigidity,
            Cmd::StatsCampbell => Command::StatsCampbell,
            Cmd::Truncation => Command::Truncation,
        }
    }
}

/// Run a log-gas experiment. Outputs go to `<out>/<config hash>/`.
#[derive(Debug, Parser)]
#[command(name = "loggas-dlr", version)]
struct Args {
    command: Cmd,
    /// JSON config; keys not given take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any config key, e.g. `--set n=64 --set inner=[-2,2]`.
    #[arg(long = "set", value_name = "KEY=JSON")]
    set: Vec<String>,
}

fn parse_override(s: &str) -> CliResult<(String, Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::validation(s, "override must look like key=value"))?;
    // bare words are taken as strings so `--set out=dir` works unquoted
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

fn run(args: Args) -> CliResult<bool> {
    let source = args.config.as_ref().map(std::fs::read_to_string).transpose()?;
    let mut overrides = args.set.iter().map(|s| parse_override(s)).collect::<CliResult<Vec<_>>>()?;
    if let Some(s) = args.seed {
        overrides.push(("seed".into(), Value::from(s)));
    }
    if let Some(w) = args.workers {
        overrides.push(("workers".into(), Value::from(w)));
    }
    if let Some(o) = &args.out {
        overrides.push(("out".into(), Value::from(o.to_string_lossy().into_owned())));
    }
    let cfg = assemble_config(args.command.into(), source.as_deref(), overrides)?;
    let report = execute(&cfg)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{}", report.dir.display());
    Ok(report.pass)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(2)
        }
    }
}
