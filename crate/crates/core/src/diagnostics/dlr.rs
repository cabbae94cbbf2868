use rayon::prelude::*;
use serde::Serialize;

use super::{MCEstimate, Welford};
use crate::config::{PointConfiguration, Window};
use crate::error::{Error, Result};
use crate::sampler::{chain_rng, resample_interior, GasParams, LogGasChain, Schedule};

/// Tuning of the paired DLR estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DlrOptions {
    /// Kernel resamples averaged per exterior sample.
    pub k_inner: usize,
    /// Proposals per kernel resample; `None` means `200·N`.
    pub kernel_steps: Option<u64>,
}

impl Default for DlrOptions {
    fn default() -> Self {
        Self {
            k_inner: 4,
            kernel_steps: None,
        }
    }
}

/// `f(γ)` minus the average of `f` over kernel resamples.
pub fn paired_difference(f_gamma: f64, kernel_values: &[f64]) -> f64 {
    f_gamma - kernel_values.iter().sum::<f64>() / kernel_values.len() as f64
}

/// A statistic on finite configurations.
pub type Statistic<'a> = &'a (dyn Fn(&PointConfiguration) -> f64 + Sync);

/// Paired estimate of `E_Q[f - f_kernel]` under `Q_{n,β}`.
///
/// Chain `c` samples the gas on stream `(c, 0)` and draws its kernel
/// resamples from stream `(c, 1)`. The per-sample differences of all chains
/// are pooled in chain order.
#[allow(clippy::too_many_arguments)]
pub fn dlr_residual<F>(
    f: F,
    params: GasParams,
    inner: Window,
    outer_radius: f64,
    chains: usize,
    schedule: &Schedule,
    opts: &DlrOptions,
    seed: u64,
    workers: usize,
) -> Result<MCEstimate>
where
    F: Fn(&PointConfiguration) -> f64 + Sync,
{
    let stats: [Statistic; 1] = [&f];
    let mut out = dlr_residuals(&stats, params, inner, outer_radius, chains, schedule, opts, seed, workers)?;
    Ok(out.remove(0))
}

/// [`dlr_residual`] for several statistics sharing the same gas samples and
/// kernel resamples.
#[allow(clippy::too_many_arguments)]
pub fn dlr_residuals(
    stats: &[Statistic],
    params: GasParams,
    inner: Window,
    outer_radius: f64,
    chains: usize,
    schedule: &Schedule,
    opts: &DlrOptions,
    seed: u64,
    workers: usize,
) -> Result<Vec<MCEstimate>> {
    if opts.k_inner == 0 || chains == 0 {
        return Err(Error::InvalidParams("need at least one chain and one kernel resample".into()));
    }
    inner.check_nested_in(&params.domain())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let model = params.model();
    let per_chain: Vec<Result<Vec<Vec<f64>>>> = pool.install(|| {
        (0..chains)
            .into_par_iter()
            .map(|c| {
                let mut gas = LogGasChain::new(params, chain_rng(seed, c as u64, 0));
                let mut krng = chain_rng(seed, c as u64, 1);
                let mut diffs = vec![Vec::with_capacity(schedule.emissions() as usize); stats.len()];
                let mut err = None;
                let mut vals = vec![Vec::with_capacity(opts.k_inner); stats.len()];
                gas.run(schedule, |state| {
                    if err.is_some() {
                        return;
                    }
                    let gamma = state.configuration();
                    vals.iter_mut().for_each(Vec::clear);
                    for _ in 0..opts.k_inner {
                        match resample_interior(&gamma, inner, outer_radius, model, params.beta, opts.kernel_steps, &mut krng) {
                            Ok(eta) => {
                                for (v, f) in vals.iter_mut().zip(stats) {
                                    v.push(f(&eta));
                                }
                            }
                            Err(e) => {
                                err = Some(e);
                                return;
                            }
                        }
                    }
                    for ((d, v), f) in diffs.iter_mut().zip(&vals).zip(stats) {
                        d.push(paired_difference(f(&gamma), v));
                    }
                });
                err.map_or(Ok(diffs), Err)
            })
            .collect()
    });
    let mut acc = vec![Welford::default(); stats.len()];
    for chain in per_chain {
        for (a, d) in acc.iter_mut().zip(chain?) {
            d.into_iter().for_each(|x| a.push(x));
        }
    }
    acc.iter().map(Welford::estimate).collect()
}
