use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{chain_rng, ChainRng, GasParams};
use crate::config::PointConfiguration;
use crate::energy::pair_energy;
use crate::error::{Error, Result};
use crate::sum::Compensated;

/// Number of ratio factors multiplied before one logarithm is taken.
const LOG_BLOCK: usize = 16;
/// Proposals per step-size adaptation batch during burn-in.
const TUNE_BATCH: u64 = 200;
const TARGET_LOW: f64 = 0.3;
const TARGET_HIGH: f64 = 0.5;

/// Proposal counts of a Metropolis run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// Total proposals, burn-in included.
    pub steps: u64,
    pub burn_in: u64,
    /// Proposals between emitted states.
    pub thin: u64,
}

impl Schedule {
    pub fn new(steps: u64, burn_in: u64, thin: u64) -> Result<Self> {
        if thin < 1 {
            return Err(Error::InvalidSchedule("thin must be at least 1".into()));
        }
        if steps <= burn_in {
            return Err(Error::InvalidSchedule(format!(
                "steps ({steps}) must exceed burn_in ({burn_in})"
            )));
        }
        Ok(Self { steps, burn_in, thin })
    }

    /// `samples` emissions with the default burn-in of `10^4` sweeps and one
    /// sweep (`n` proposals) between emissions.
    pub fn with_defaults(n: usize, samples: u64) -> Self {
        let n = n as u64;
        let burn_in = 10 * n * 1000;
        Self {
            steps: burn_in + samples * n,
            burn_in,
            thin: n,
        }
    }

    /// Number of states emitted by a run.
    pub fn emissions(&self) -> u64 {
        (self.steps - self.burn_in) / self.thin
    }
}

/// One Metropolis chain targeting `Q_{n,β}` on `Λ_n = [-n/2, n/2)`.
///
/// Alongside the positions the chain keeps `sin(πx/n)` and `cos(πx/n)` for
/// every particle. The energy change of a single-particle move is then a
/// product of ratios `|sin(θ' - θ_j) / sin(θ - θ_j)|` evaluated with the
/// angle-difference formula, so a proposal costs `O(n)` multiplications and
/// one logarithm per [`LOG_BLOCK`] particles.
#[derive(Debug, Clone)]
pub struct LogGasChain {
    params: GasParams,
    positions: Vec<f64>,
    sin: Vec<f64>,
    cos: Vec<f64>,
    energy: Compensated,
    step_scale: f64,
    accepted: u64,
    proposed: u64,
    rng: ChainRng,
}

impl LogGasChain {
    /// Starts from a jittered lattice.
    pub fn new(params: GasParams, mut rng: ChainRng) -> Self {
        let n = params.n;
        let half = 0.5 * n as f64;
        let positions: Vec<f64> = (0..n)
            .map(|k| -half + k as f64 + 0.5 + 0.4 * (rng.random::<f64>() - 0.5))
            .collect();
        Self::with_positions(params, positions, rng)
    }

    pub fn from_configuration(
        params: GasParams,
        config: &PointConfiguration,
        rng: ChainRng,
    ) -> Result<Self> {
        if config.len() != params.n {
            return Err(Error::CardinalityMismatch {
                left: config.len(),
                right: params.n,
            });
        }
        let half = 0.5 * params.n as f64;
        if config.iter().any(|x| !(-half..half).contains(&x)) {
            return Err(Error::DomainError(format!(
                "initial points must lie in [-{half}, {half})"
            )));
        }
        Ok(Self::with_positions(params, config.points().to_vec(), rng))
    }

    fn with_positions(params: GasParams, positions: Vec<f64>, rng: ChainRng) -> Self {
        let n = params.n as f64;
        let (sin, cos) = positions.iter().map(|&x| (PI * x / n).sin_cos()).unzip();
        let energy = Compensated::with_value(pair_energy(params.model(), &positions));
        Self {
            params,
            positions,
            sin,
            cos,
            energy,
            step_scale: 0.5,
            accepted: 0,
            proposed: 0,
            rng,
        }
    }

    pub fn params(&self) -> GasParams {
        self.params
    }

    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    pub fn set_step_scale(&mut self, s: f64) {
        self.step_scale = s.clamp(1e-6, 0.5 * self.params.n as f64);
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn proposed(&self) -> u64 {
        self.proposed
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn reset_counters(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
    }

    /// Incrementally maintained `H^{n-per}_{Λ_n}`.
    pub fn cached_energy(&self) -> f64 {
        self.energy.value()
    }

    /// `H^{n-per}_{Λ_n}` recomputed from scratch.
    pub fn recompute_energy(&self) -> f64 {
        pair_energy(self.params.model(), &self.positions)
    }

    /// `|cached - recomputed|`.
    pub fn energy_drift(&self) -> f64 {
        (self.cached_energy() - self.recompute_energy()).abs()
    }

    /// Current state as a sorted configuration.
    pub fn configuration(&self) -> PointConfiguration {
        let mut pts = self.positions.clone();
        pts.sort_by(f64::total_cmp);
        PointConfiguration::from_sorted_unchecked(pts)
    }

    fn wrap(&self, x: f64) -> f64 {
        let n = self.params.n as f64;
        let half = 0.5 * n;
        let mut y = (x + half).rem_euclid(n) - half;
        if y >= half {
            y -= n;
        }
        y
    }

    /// Energy change of moving particle `i` to the angle with sine/cosine
    /// `(s_new, c_new)`, or `None` if that lands on another particle.
    #[inline]
    fn delta_energy(&self, i: usize, s_new: f64, c_new: f64) -> Option<f64> {
        let (s_old, c_old) = (self.sin[i], self.cos[i]);
        let mut log_acc = 0.0;
        let mut num = 1.0;
        let mut den = 1.0;
        let mut in_block = 0;
        let sin = &self.sin;
        let cos = &self.cos;
        for j in (0..i).chain(i + 1..sin.len()) {
            let a = s_new * cos[j] - c_new * sin[j];
            let b = s_old * cos[j] - c_old * sin[j];
            num *= a;
            den *= b;
            in_block += 1;
            if in_block == LOG_BLOCK {
                if num == 0.0 {
                    return None;
                }
                log_acc += (num / den).abs().ln();
                num = 1.0;
                den = 1.0;
                in_block = 0;
            }
        }
        if num == 0.0 {
            return None;
        }
        log_acc += (num / den).abs().ln();
        Some(-log_acc)
    }

    /// One single-particle proposal; returns whether it was accepted.
    pub fn step(&mut self) -> bool {
        let n = self.params.n;
        let i = self.rng.random_range(0..n);
        let xi: f64 = self.rng.sample(StandardNormal);
        let x_new = self.wrap(self.positions[i] + self.step_scale * xi);
        let (s_new, c_new) = (PI * x_new / n as f64).sin_cos();
        self.proposed += 1;
        let Some(dh) = self.delta_energy(i, s_new, c_new) else {
            return false;
        };
        let accept = dh <= 0.0 || self.rng.random::<f64>().ln() < -self.params.beta * dh;
        if accept {
            self.positions[i] = x_new;
            self.sin[i] = s_new;
            self.cos[i] = c_new;
            self.energy.add(dh);
            self.accepted += 1;
        }
        accept
    }

    /// `n` proposals.
    pub fn sweep(&mut self) {
        for _ in 0..self.params.n {
            self.step();
        }
    }

    /// Runs `proposals` steps while steering the acceptance rate into
    /// `[0.3, 0.5]`; the step scale is left frozen afterwards.
    pub fn tune(&mut self, proposals: u64) {
        let mut done = 0;
        while done < proposals {
            let batch = TUNE_BATCH.min(proposals - done);
            let mut acc = 0u64;
            for _ in 0..batch {
                acc += self.step() as u64;
            }
            done += batch;
            let rate = acc as f64 / batch as f64;
            if rate > TARGET_HIGH {
                self.set_step_scale(self.step_scale * 1.15);
            } else if rate < TARGET_LOW {
                self.set_step_scale(self.step_scale / 1.15);
            }
        }
    }

    /// Burn-in with tuning, then calls `emit` every `thin` proposals.
    pub fn run<F: FnMut(&LogGasChain)>(&mut self, schedule: &Schedule, mut emit: F) {
        self.tune(schedule.burn_in);
        self.reset_counters();
        for t in 1..=(schedule.steps - schedule.burn_in) {
            self.step();
            if t % schedule.thin == 0 {
                emit(self);
            }
        }
    }
}

/// Emitted states and bookkeeping of one chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McmcOutput {
    pub samples: Vec<PointConfiguration>,
    /// Acceptance rate after burn-in.
    pub acceptance_rate: f64,
    pub step_scale: f64,
    pub energy_drift: f64,
}

/// Runs one chain targeting `Q_{n,β}` and collects the emitted states.
pub fn loggas_mcmc(params: GasParams, schedule: &Schedule, rng: ChainRng) -> McmcOutput {
    let mut chain = LogGasChain::new(params, rng);
    let mut samples = Vec::with_capacity(schedule.emissions() as usize);
    chain.run(schedule, |c| samples.push(c.configuration()));
    McmcOutput {
        samples,
        acceptance_rate: chain.acceptance_rate(),
        step_scale: chain.step_scale(),
        energy_drift: chain.energy_drift(),
    }
}

/// Runs `chains` independent chains on `workers` threads.
///
/// Chain `k` uses stream `(k, 0)` of `seed`; results come back in chain
/// order, so the worker count never changes the output.
pub fn run_chains(
    params: GasParams,
    schedule: &Schedule,
    chains: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<McmcOutput>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok(pool.install(|| {
        (0..chains)
            .into_par_iter()
            .map(|k| loggas_mcmc(params, schedule, chain_rng(seed, k as u64, 0)))
            .collect()
    }))
}
