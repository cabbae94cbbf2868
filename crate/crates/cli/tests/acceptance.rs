//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use loggas_core::energy::{moved_charge_potential, renormalized_energy_periodic};
use loggas_core::partition::{z_exact, z_quadrature};
use loggas_core::sampler::{bernoulli_sample, chain_rng};
use loggas_core::{w1_distance, GasParams, InteractionModel, PointConfiguration, Window};
use loggas_dlr::{assemble_config, compute, execute, Command, ExperimentConfig};
use rand::Rng;
use serde_json::{json, Value};

type Verdict = Result<String, String>;

fn config(command: Command, keys: Value) -> ExperimentConfig {
    let Value::Object(m) = keys else { panic!("keys must be an object") };
    assemble_config(command, None, m).expect("valid acceptance config")
}

fn checks(cfg: &ExperimentConfig) -> Verdict {
    let out = compute(cfg).map_err(|e| e.to_string())?;
    let detail: Vec<String> = out
        .checks
        .iter()
        .map(|c| format!("{}={} ({})", c.name, if c.pass { "ok" } else { "fail" }, c.detail))
        .collect();
    if out.pass() {
        Ok(detail.join("; "))
    } else {
        Err(detail.join("; "))
    }
}

fn partition_closed_form() -> Verdict {
    let mut worst: f64 = 0.0;
    for (n, beta) in [(1, 1.0), (2, 1.0), (2, 2.0), (2, 4.0), (3, 2.0)] {
        let p = GasParams::new(n, beta).unwrap();
        let exact = z_exact(p).value();
        let quad = z_quadrature(p).map_err(|e| e.to_string())?.value();
        worst = worst.max((quad - exact).abs() / exact);
    }
    let z22 = z_exact(GasParams::new(2, 2.0).unwrap()).value();
    let z32 = z_exact(GasParams::new(3, 2.0).unwrap()).value();
    let detail = format!("max rel diff {worst:.2e}, Z(2,2)={z22}, Z(3,2)={z32}");
    if worst <= 1e-3 && (z22 - 2.0).abs() < 1e-12 && (z32 - 6.0).abs() < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn algebraic_identity() -> Verdict {
    checks(&config(
        Command::VerifyIdentity,
        json!({"n": 32, "instances": 1000, "max_interior": 5, "tolerance": 1e-9, "seed": 2}),
    ))
}

fn dlr_residual() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for beta in [1.0, 2.0] {
        let cfg = config(
            Command::VerifyDlr,
            json!({"n": 16, "beta": beta, "inner": [-1, 1], "samples": 4000, "seed": 3, "max_std_error": 0.01}),
        );
        match checks(&cfg) {
            Ok(d) => lines.push(format!("beta={beta}: {d}")),
            Err(d) => {
                ok = false;
                lines.push(format!("beta={beta}: {d}"));
            }
        }
    }
    if ok {
        Ok(lines.join(" | "))
    } else {
        Err(lines.join(" | "))
    }
}

fn lattice_energy() -> Verdict {
    let target = -std::f64::consts::PI * (2.0 * std::f64::consts::PI).ln();
    let mut worst: f64 = 0.0;
    for n in [1u32, 2, 4, 8, 16] {
        let nf = n as f64;
        let pts = (0..n).map(|k| -nf / 2.0 + k as f64 + 0.5).collect();
        let g = PointConfiguration::new(pts).unwrap();
        let w = renormalized_energy_periodic(&g, n).map_err(|e| e.to_string())?;
        worst = worst.max((w - target).abs());
    }
    let detail = format!("max |W + pi log 2pi| = {worst:.2e}");
    if worst <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn potential_bounds() -> Verdict {
    let np = InteractionModel::NonPeriodic;
    let unit = Window::new(-1.0, 1.0).unwrap();
    let mut rng = chain_rng(5, 0, 0);
    let h = 1e-6;
    let mut violations = 0;
    for _ in 0..1000 {
        let k = rng.random_range(1..=5);
        let eta = bernoulli_sample(k, &unit, &mut rng);
        let gam = bernoulli_sample(k, &unit, &mut rng);
        let w1 = w1_distance(&eta, &gam).unwrap();
        let dist = rng.random_range(1.0..20.0);
        let x = if rng.random::<bool>() { 1.0 + dist } else { -1.0 - dist };
        let psi = |t: f64| moved_charge_potential(np, &eta, &gam, t);
        let dpsi = (psi(x + h) - psi(x - h)) / (2.0 * h);
        let bound_ok = psi(x).abs() <= w1 / dist * (1.0 + 1e-12) + 1e-15;
        let dbound = 8.0 * w1 / (dist * dist);
        let dbound_ok = dpsi.abs() <= dbound * (1.0 + 1e-3) + 1e-9;
        violations += usize::from(!bound_ok) + usize::from(!dbound_ok);
    }
    let detail = format!("{violations} violations over 1000 pairs");
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn discrepancy_trend() -> Verdict {
    checks(&config(
        Command::StatsDiscrepancy,
        json!({"n": 256, "beta": 2, "samples": 2000, "thin": 1280, "rotations": 8,
               "lengths": [1, 2, 4, 8, 16], "bound_factor": 1.5, "nonincreasing_from": 4, "seed": 6}),
    ))
}

fn campbell_oracle() -> Verdict {
    checks(&config(
        Command::StatsCampbell,
        json!({"samples": 4000, "campbell_domain": [-3, 4], "campbell_support": [0, 1], "seed": 7}),
    ))
}

fn truncation_profile() -> Verdict {
    checks(&config(
        Command::Truncation,
        json!({"n": 512, "beta": 2, "inner": [-1, 1], "delta": 0.1, "radii": [16, 32, 64, 128],
               "samples": 300, "thin": 5120, "min_fraction": 0.9, "seed": 8}),
    ))
}

fn rigidity_probe() -> Verdict {
    checks(&config(
        Command::StatsRigidity,
        json!({"n": 512, "beta": 2, "samples": 2000, "thin": 2560, "rotations": 8,
               "window": [-4, 4], "scales": [1, 2, 4, 8], "seed": 9}),
    ))
}

/// Small configs exercising every command, used for the rerun comparison.
fn determinism_config(command: Command) -> Value {
    let base = json!({"n": 8, "samples": 20, "burn_in": 2000, "chains": 2, "seed": 10});
    let extra = match command {
        Command::VerifyDlr => json!({"samples": 10, "max_std_error": 1.0}),
        Command::VerifyIdentity => json!({"n": 32, "instances": 50}),
        Command::Partition => json!({"n": 2}),
        Command::StatsDiscrepancy => json!({"lengths": [1, 2], "rotations": 2}),
        Command::StatsRigidity => json!({"window": [-2, 2], "scales": [0.5, 1], "rotations": 2}),
        Command::StatsCampbell => json!({"samples": 200}),
        Command::Truncation => json!({"n": 32, "radii": [4, 8], "samples": 4, "trial_count": 4}),
        Command::Sample | Command::Resample => json!({}),
    };
    let mut m = base.as_object().unwrap().clone();
    m.extend(extra.as_object().unwrap().clone());
    Value::Object(m)
}

fn rerun_determinism() -> Verdict {
    let mut compared = 0;
    for command in Command::ALL {
        let mut artifacts = Vec::new();
        for workers in [1, 2] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut keys = determinism_config(command);
            keys["workers"] = json!(workers);
            keys["out"] = json!(dir.path());
            let report = execute(&config(command, keys)).map_err(|e| format!("{}: {e}", command.name()))?;
            let read = |f: &str| std::fs::read(report.dir.join(f)).ok();
            artifacts.push((read("results.csv"), read("samples.jsonl")));
        }
        if artifacts[0].0.is_none() {
            return Err(format!("{}: no results.csv", command.name()));
        }
        if artifacts[0] != artifacts[1] {
            return Err(format!("{}: artifacts differ between workers 1 and 2", command.name()));
        }
        compared += 1;
    }
    Ok(format!("{compared} commands byte-identical across reruns"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("partition closed form vs quadrature", partition_closed_form),
        ("algebraic identity", algebraic_identity),
        ("canonical DLR residual", dlr_residual),
        ("periodic renormalized energy", lattice_energy),
        ("moved-charge potential bounds", potential_bounds),
        ("discrepancy bound trend", discrepancy_trend),
        ("Campbell / Slivnyak-Mecke oracle", campbell_oracle),
        ("truncation-error profile", truncation_profile),
        ("rigidity probe with Poisson control", rigidity_probe),
        ("determinism", rerun_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(d) => println!("criterion {:>2} PASS {name} [{secs:.1}s]: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} [{secs:.1}s]: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
