use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use serde_json::json;

use loggas_core::config::read_jsonl;
use loggas_core::diagnostics::{
    algebraic_identity_residual, bump, campbell_estimate, campbell_sum, discrepancy_stats,
    dlr_residuals, random_identity_instance, rigidity_probe, truncation_profile, DlrOptions,
    MCEstimate, RigidityCurve, Statistic, DEFAULT_TUPLE_CAP,
};
use loggas_core::partition::{z_exact, z_quadrature, QUADRATURE_MAX_N};
use loggas_core::sampler::{chain_rng, poisson_sample, resample_interior, run_chains};
use loggas_core::{InteractionModel, PointConfiguration, Window};

use crate::config::{Command, DlrStatistic, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{create_run_dir, write_run, Check, Outcome, ResultRow, RunReport};

/// Runs the command of `cfg` and writes its artifacts under `out/<hash>`.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let start = Instant::now();
    let outcome = compute(cfg)?;
    let dir = create_run_dir(cfg)?;
    write_run(&dir, cfg, &outcome, start.elapsed().as_secs_f64())?;
    Ok(RunReport {
        dir,
        pass: outcome.pass(),
        checks: outcome.checks,
    })
}

/// The command pipeline without any file output.
pub fn compute(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    match cfg.command {
        Command::Sample => sample(cfg),
        Command::Resample => resample(cfg),
        Command::VerifyDlr => verify_dlr(cfg),
        Command::VerifyIdentity => verify_identity(cfg),
        Command::Partition => partition(cfg),
        Command::StatsDiscrepancy => stats_discrepancy(cfg),
        Command::StatsRigidity => stats_rigidity(cfg),
        Command::StatsCampbell => stats_campbell(cfg),
        Command::Truncation => truncation(cfg),
    }
}

/// Gas samples of all chains, in chain order.
pub fn gas_samples(cfg: &ExperimentConfig) -> CliResult<Vec<PointConfiguration>> {
    let outs = run_chains(cfg.params()?, &cfg.schedule()?, cfg.chains, cfg.seed, cfg.workers)?;
    Ok(outs.into_iter().flat_map(|o| o.samples).collect())
}

/// Each sample followed by its rotations by `k·n/rotations`.
fn with_rotations(cfg: &ExperimentConfig, samples: Vec<PointConfiguration>) -> CliResult<Vec<PointConfiguration>> {
    if cfg.rotations == 1 {
        return Ok(samples);
    }
    let n = cfg.n as f64;
    let mut out = Vec::with_capacity(samples.len() * cfg.rotations);
    for g in &samples {
        for k in 0..cfg.rotations {
            out.push(g.rotate_periodic(k as f64 * n / cfg.rotations as f64, n)?);
        }
    }
    Ok(out)
}

fn sample(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let params = cfg.params()?;
    let schedule = cfg.schedule()?;
    let outs = run_chains(params, &schedule, cfg.chains, cfg.seed, cfg.workers)?;
    let domain = params.domain();
    let mut out = Outcome::default();
    out.run = json!({
        "params": params,
        "steps": schedule.steps,
        "burn_in": schedule.burn_in,
        "thin": schedule.thin,
        "acceptance_rate": outs.iter().map(|o| o.acceptance_rate).collect::<Vec<_>>(),
        "step_scale": outs.iter().map(|o| o.step_scale).collect::<Vec<_>>(),
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    for (c, o) in outs.iter().enumerate() {
        let drift_ok = o.energy_drift <= 1e-6;
        out.rows.push(
            ResultRow::new("acceptance_rate", cfg, &domain, c as f64)
                .value(o.acceptance_rate, 0.0, o.samples.len())
                .pass(o.acceptance_rate > 0.0),
        );
        out.rows.push(
            ResultRow::new("energy_drift", cfg, &domain, c as f64)
                .value(o.energy_drift, 0.0, o.samples.len())
                .pass(drift_ok),
        );
        out.checks.push(Check::new(
            &format!("energy_cache_chain_{c}"),
            drift_ok,
            format!("drift {:e}", o.energy_drift),
        ));
    }
    let samples: Vec<PointConfiguration> = outs.into_iter().flat_map(|o| o.samples).collect();
    let counts: Vec<f64> = samples.iter().map(|g| g.count_in(&cfg.inner) as f64).collect();
    let e = MCEstimate::from_samples(&counts)?;
    out.rows.push(ResultRow::new("window_count", cfg, &cfg.inner, cfg.inner.length()).estimate(&e));
    out.samples = Some(samples);
    Ok(out)
}

fn resample(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let input = match &cfg.input {
        Some(path) => read_jsonl(BufReader::new(File::open(path)?))?,
        None => gas_samples(cfg)?,
    };
    let outer = Window::symmetric(cfg.outer_radius())?;
    let model = InteractionModel::periodic(cfg.n as u32)?;
    let mut out = Outcome::default();
    let mut resampled = Vec::with_capacity(input.len());
    let (mut count_ok, mut ext_ok) = (true, true);
    for (i, g) in input.iter().enumerate() {
        let mut rng = chain_rng(cfg.seed, i as u64, 1);
        let r = resample_interior(g, cfg.inner, cfg.outer_radius(), model, cfg.beta, cfg.kernel_steps, &mut rng)?;
        count_ok &= r.count_in(&cfg.inner) == g.count_in(&cfg.inner);
        ext_ok &= r.annulus(&cfg.inner, &outer) == g.annulus(&cfg.inner, &outer);
        resampled.push(r);
    }
    let counts: Vec<f64> = resampled.iter().map(|g| g.count_in(&cfg.inner) as f64).collect();
    let e = MCEstimate::from_samples(&counts)?;
    out.rows.push(ResultRow::new("resampled_count", cfg, &cfg.inner, cfg.outer_radius()).estimate(&e).pass(count_ok));
    out.checks.push(Check::new("count_invariance", count_ok, "interior count preserved"));
    out.checks.push(Check::new("exterior_unchanged", ext_ok, "exterior points kept bitwise"));
    out.samples = Some(resampled);
    Ok(out)
}

/// `exp(-Σ φ(x))` with `φ` a bump filling `inner`.
fn smooth_statistic(inner: Window) -> impl Fn(&PointConfiguration) -> f64 + Sync {
    let (c, h) = (inner.midpoint(), inner.length() / 2.0);
    move |g: &PointConfiguration| (-g.restrict(&inner).iter().map(|x| bump((x - c) / h)).sum::<f64>()).exp()
}

fn verify_dlr(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let inner = cfg.inner;
    let constant = |_: &PointConfiguration| 1.0;
    let count = move |g: &PointConfiguration| g.count_in(&inner) as f64;
    let smooth = smooth_statistic(inner);
    let stats: Vec<Statistic> = cfg
        .statistics
        .iter()
        .map(|s| -> Statistic {
            match s {
                DlrStatistic::Constant => &constant,
                DlrStatistic::Count => &count,
                DlrStatistic::Smooth => &smooth,
            }
        })
        .collect();
    let opts = DlrOptions {
        k_inner: cfg.k_inner,
        kernel_steps: cfg.kernel_steps,
    };
    let ests = dlr_residuals(
        &stats,
        cfg.params()?,
        inner,
        cfg.outer_radius(),
        cfg.chains,
        &cfg.schedule()?,
        &opts,
        cfg.seed,
        cfg.workers,
    )?;
    let mut out = Outcome::default();
    for (s, e) in cfg.statistics.iter().zip(&ests) {
        let (name, pass) = match s {
            DlrStatistic::Constant => ("dlr_constant", e.mean == 0.0 && e.variance == 0.0),
            DlrStatistic::Count => ("dlr_count", e.mean == 0.0 && e.variance == 0.0),
            DlrStatistic::Smooth => (
                "dlr_smooth",
                e.within(0.0, cfg.se_threshold) && e.std_error <= cfg.max_std_error,
            ),
        };
        out.rows.push(ResultRow::new(name, cfg, &inner, cfg.outer_radius()).estimate(e).pass(pass));
        out.checks.push(Check::new(name, pass, format!("mean {:e} se {:e}", e.mean, e.std_error)));
    }
    Ok(out)
}

fn verify_identity(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let n = u32::try_from(cfg.n).map_err(|_| CliError::validation("n", "too large"))?;
    let model = InteractionModel::periodic(n)?;
    let mut rng = chain_rng(cfg.seed, 0, 0);
    let mut residuals = Vec::with_capacity(cfg.instances);
    for _ in 0..cfg.instances {
        let (g, e, w) = random_identity_instance(n, cfg.max_interior, &mut rng)?;
        residuals.push(algebraic_identity_residual(model, &g, &e, &w)?);
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let pass = worst <= cfg.tolerance;
    let domain = cfg.params()?.domain();
    let mut out = Outcome::default();
    let e = MCEstimate::from_samples(&residuals)?;
    out.rows.push(ResultRow::new("identity_residual_mean", cfg, &domain, cfg.max_interior as f64).estimate(&e).pass(pass));
    out.rows.push(
        ResultRow::new("identity_residual_max", cfg, &domain, cfg.max_interior as f64)
            .value(worst, 0.0, residuals.len())
            .pass(pass),
    );
    out.checks.push(Check::new("algebraic_identity", pass, format!("max residual {worst:e}")));
    Ok(out)
}

fn partition(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let params = cfg.params()?;
    let domain = params.domain();
    let exact = z_exact(params);
    let mut out = Outcome::default();
    out.rows.push(ResultRow::new("z_exact", cfg, &domain, 0.0).value(exact.value(), 0.0, 0));
    if params.n <= QUADRATURE_MAX_N {
        let q = z_quadrature(params)?;
        let rel = (q.value() - exact.value()).abs() / exact.value();
        let pass = rel <= cfg.rel_tol;
        out.rows.push(
            ResultRow::new("z_quadrature", cfg, &domain, 0.0)
                .value(q.value(), q.std_error * q.value(), 0)
                .pass(pass),
        );
        out.rows.push(ResultRow::new("z_rel_diff", cfg, &domain, cfg.rel_tol).value(rel, 0.0, 0).pass(pass));
        out.checks.push(Check::new("partition_closed_form", pass, format!("relative difference {rel:e}")));
    }
    Ok(out)
}

fn stats_discrepancy(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let samples = with_rotations(cfg, gas_samples(cfg)?)?;
    let windows: Vec<Window> = cfg.lengths.iter().map(|&l| Window::centered(l)).collect::<Result<_, _>>()?;
    let stats = discrepancy_stats(&samples, &windows)?;
    let k = cfg.se_threshold;
    let cap = cfg.bound_factor * stats[0].ratio;
    let mut out = Outcome::default();
    let mut bounded = true;
    let mut monotone = true;
    for (i, s) in stats.iter().enumerate() {
        let ok_bound = s.ratio <= cap + k * s.ratio_se;
        let ok_step = match i.checked_sub(1).map(|j| &stats[j]) {
            Some(prev) if prev.window.length() >= cfg.nonincreasing_from => {
                s.ratio <= prev.ratio + k * (s.ratio_se.powi(2) + prev.ratio_se.powi(2)).sqrt()
            }
            _ => true,
        };
        bounded &= ok_bound;
        monotone &= ok_step;
        out.rows.push(
            ResultRow::new("discrepancy_ratio", cfg, &s.window, s.window.length())
                .value(s.ratio, s.ratio_se, s.discr_sq.n_samples)
                .pass(ok_bound && ok_step),
        );
        out.rows.push(ResultRow::new("discrepancy_mean", cfg, &s.window, s.window.length()).estimate(&s.discr));
    }
    out.checks.push(Check::new("discrepancy_bounded", bounded, format!("cap {cap}")));
    out.checks.push(Check::new(
        "discrepancy_nonincreasing",
        monotone,
        format!("from length {}", cfg.nonincreasing_from),
    ));
    Ok(out)
}

fn curve_rows(out: &mut Outcome, test: &str, cfg: &ExperimentConfig, curve: &RigidityCurve) {
    for p in &curve.points {
        out.rows.push(
            ResultRow::new(test, cfg, &curve.window, p.scale).value(p.statistic.variance, p.variance_se, p.statistic.n_samples),
        );
    }
}

fn stats_rigidity(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let samples = with_rotations(cfg, gas_samples(cfg)?)?;
    let gas = rigidity_probe(&samples, &cfg.window, &cfg.scales)?;
    let domain = cfg.params()?.domain();
    let mut rng = chain_rng(cfg.seed, 0, 4);
    let control: Vec<PointConfiguration> = (0..samples.len())
        .map(|_| poisson_sample(1.0, &domain, &mut rng))
        .collect::<Result<_, _>>()?;
    let pois = rigidity_probe(&control, &cfg.window, &cfg.scales)?;
    let mut out = Outcome::default();
    curve_rows(&mut out, "rigidity_gas", cfg, &gas);
    curve_rows(&mut out, "rigidity_poisson", cfg, &pois);
    let k = cfg.se_threshold;
    let decreasing = gas.strictly_decreasing(k);
    let control_ok = pois.nondecreasing(k);
    let drops: Vec<String> = (0..gas.points.len().saturating_sub(1))
        .map(|i| {
            let (d, se) = gas.variance_drop(i);
            format!("{d:.4}±{se:.4}")
        })
        .collect();
    out.checks.push(Check::new("rigidity_gas_decreasing", decreasing, drops.join(", ")));
    out.checks.push(Check::new("rigidity_poisson_nondecreasing", control_ok, "negative control"));
    Ok(out)
}

fn stats_campbell(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let mut rng = chain_rng(cfg.seed, 0, 0);
    let samples: Vec<PointConfiguration> = (0..cfg.samples)
        .map(|_| poisson_sample(1.0, &cfg.campbell_domain, &mut rng))
        .collect::<Result<_, _>>()?;
    let b = cfg.campbell_support;
    let ind = move |x: &[f64], _: &PointConfiguration| b.contains(x[0]) as u8 as f64;
    let lonely = move |x: &[f64], rest: &PointConfiguration| (b.contains(x[0]) && rest.count_in(&b) == 0) as u8 as f64;
    let intensity = campbell_estimate(&samples, 1, ind, &b, DEFAULT_TUPLE_CAP)?;
    let void = campbell_estimate(&samples, 1, lonely, &b, DEFAULT_TUPLE_CAP)?;
    // brute force: a sample contributes 1 exactly when it has a single point in b
    let brute: Vec<f64> = samples.iter().map(|g| (g.count_in(&b) == 1) as u8 as f64).collect();
    let brute_mean = MCEstimate::from_samples(&brute)?;
    let per_sample_ok = samples
        .iter()
        .zip(&brute)
        .all(|(g, &v)| campbell_sum(g, 1, &lonely, &b, DEFAULT_TUPLE_CAP).map_or(false, |s| s == v));
    let target = b.length();
    let intensity_ok = intensity.test_statistic_mean.within(target, cfg.se_threshold);
    let identity_ok = per_sample_ok && void.test_statistic_mean.mean == brute_mean.mean;
    let mut out = Outcome::default();
    out.rows.push(ResultRow::new("campbell_intensity", cfg, &b, target).estimate(&intensity.test_statistic_mean).pass(intensity_ok));
    out.rows.push(ResultRow::new("campbell_lonely_point", cfg, &b, brute_mean.mean).estimate(&void.test_statistic_mean).pass(identity_ok));
    out.checks.push(Check::new("slivnyak_mecke", intensity_ok, format!("target {target}")));
    out.checks.push(Check::new("campbell_enumeration", identity_ok, "estimator equals per-sample enumeration"));
    Ok(out)
}

fn truncation(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let samples = gas_samples(cfg)?;
    let prof = truncation_profile(cfg.params()?, cfg.inner, &cfg.radii, cfg.trial_count, cfg.delta, &samples, cfg.seed)?;
    let m = prof.n_samples();
    let mut out = Outcome::default();
    for (k, &p) in prof.radii.iter().enumerate() {
        let f = prof.fraction_within_delta[k];
        let se = (f * (1.0 - f) / m as f64).sqrt();
        out.rows.push(ResultRow::new("truncation_fraction", cfg, &cfg.inner, p).value(f, se, m));
        let sups = MCEstimate::from_samples(&prof.per_sample[k])?;
        out.rows.push(ResultRow::new("truncation_sup", cfg, &cfg.inner, p).estimate(&sups));
    }
    let monotone = prof.is_nondecreasing(cfg.se_threshold);
    let last = *prof.fraction_within_delta.last().expect("radii validated nonempty");
    out.checks.push(Check::new(
        "truncation_nondecreasing",
        monotone,
        format!("{:?}", prof.fraction_within_delta),
    ));
    out.checks.push(Check::new(
        "truncation_final_fraction",
        last >= cfg.min_fraction,
        format!("{last} vs {}", cfg.min_fraction),
    ));
    Ok(out)
}
