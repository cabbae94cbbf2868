//! Partition functions of the periodic log-gas and of the Gibbs kernels.
//!
//! Values are carried as logarithms. `z_exact` gives the closed form
//! `Z_{n,β} = Γ(βn/2 + 1) / Γ(β/2 + 1)^n`, `z_quadrature` integrates the
//! Boltzmann factor on a tensor grid for `n <= 3`, and
//! `z_conditional_estimate` averages kernel weights over the Bernoulli
//! reference.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sampler::{bernoulli_sample, GasParams, KernelSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    Exact,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub log_value: f64,
    pub method: PartitionMethod,
    /// Standard error of `log_value`; zero for the closed form. For
    /// quadrature this is the Richardson correction size.
    pub std_error: f64,
}

impl PartitionValue {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `log Z_{n,β} = log Γ(βn/2 + 1) - n log Γ(β/2 + 1)`.
pub fn z_exact(params: GasParams) -> PartitionValue {
    let n = params.n as f64;
    let b = params.beta;
    PartitionValue {
        log_value: libm::lgamma(b * n / 2.0 + 1.0) - n * libm::lgamma(b / 2.0 + 1.0),
        method: PartitionMethod::Exact,
        std_error: 0.0,
    }
}

/// Largest `n` accepted by [`z_quadrature`].
pub const QUADRATURE_MAX_N: usize = 3;

/// Grid sizes per dimension for the coarse pass; the fine pass doubles them.
fn base_grid(n: usize) -> usize {
    match n {
        2 => 4096,
        _ => 512,
    }
}

/// Mean of `∏_{i<j} |2 sin(π(u_i - u_j))|^β` over `[0,1]^n` with `u_0 = 0`
/// held fixed (the integrand is translation invariant) on an `m`-point grid.
///
/// Coordinate `j` is offset by `j/(n+1)` cells so that no two coordinates
/// ever share a grid point.
fn grid_mean(n: usize, beta: f64, m: usize) -> f64 {
    let h = 1.0 / m as f64;
    let node = |j: usize, k: usize| (k as f64 + j as f64 / (n as f64 + 1.0)) * h;
    let lf = |d: f64| beta * (2.0 * (PI * d).sin()).abs().ln();
    match n {
        2 => {
            let s: f64 = (0..m).map(|k| lf(node(1, k)).exp()).sum();
            s * h
        }
        3 => {
            let l1: Vec<f64> = (0..m).map(|k| lf(node(1, k))).collect();
            let l2: Vec<f64> = (0..m).map(|k| lf(node(2, k))).collect();
            let mut total = 0.0;
            for (a, la) in l1.iter().enumerate() {
                let ua = node(1, a);
                let mut row = 0.0;
                for (b, lb) in l2.iter().enumerate() {
                    row += (la + lb + lf(ua - node(2, b))).exp();
                }
                total += row;
            }
            total * h * h
        }
        _ => unreachable!("grid_mean handles n = 2, 3"),
    }
}

/// Tensor-grid quadrature of `Z_{n,β}` for `n <= 3`, Richardson-extrapolated
/// between grids of `m` and `2m` points per dimension.
pub fn z_quadrature(params: GasParams) -> Result<PartitionValue> {
    let n = params.n;
    if n > QUADRATURE_MAX_N {
        return Err(Error::TooLarge(n));
    }
    if n == 1 {
        return Ok(PartitionValue {
            log_value: 0.0,
            method: PartitionMethod::Quadrature,
            std_error: 0.0,
        });
    }
    let m = base_grid(n);
    let coarse = grid_mean(n, params.beta, m);
    let fine = grid_mean(n, params.beta, 2 * m);
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    Ok(PartitionValue {
        log_value: extrapolated.ln(),
        method: PartitionMethod::Quadrature,
        std_error: ((extrapolated - fine) / extrapolated).abs(),
    })
}

/// Monte Carlo estimate of `Z(γ_{Λ^c}, N) = ∫ e^{-β(H_Λ(η) + M(η,γ))} B_{N,Λ}(dη)`.
///
/// The move function is measured against the kernel's reference interior;
/// without one the reference term is zero. `std_error` is the delta-method
/// standard error of the log estimate.
pub fn z_conditional_estimate<R: Rng + ?Sized>(
    spec: &KernelSpec,
    samples: usize,
    rng: &mut R,
) -> Result<PartitionValue> {
    if spec.fixed_count() == 0 {
        return Ok(PartitionValue {
            log_value: 0.0,
            method: PartitionMethod::MonteCarlo,
            std_error: 0.0,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParams("at least one sample is needed".into()));
    }
    let beta = spec.beta();
    let logs: Vec<f64> = (0..samples)
        .map(|_| {
            let eta = bernoulli_sample(spec.fixed_count(), spec.inner(), rng);
            spec.conditional_energy(eta.points())
                .map_or(f64::NEG_INFINITY, |e| -beta * e)
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeight);
    }
    let k = samples as f64;
    let scaled: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
    let mean = scaled.iter().sum::<f64>() / k;
    let var = if samples > 1 {
        scaled.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(PartitionValue {
        log_value: max + mean.ln(),
        method: PartitionMethod::MonteCarlo,
        std_error: (var / k).sqrt() / mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{PointConfiguration, Window};
    use crate::energy::InteractionModel;
    use crate::sampler::chain_rng;

    fn gas(n: usize, beta: f64) -> GasParams {
        GasParams::new(n, beta).unwrap()
    }

    #[test]
    fn exact_examples() {
        for b in [0.5, 1.0, 2.0, 7.0] {
            let z = z_exact(gas(1, b));
            assert!(z.log_value.abs() < 1e-14);
            assert_eq!(z.std_error, 0.0);
        }
        assert!((z_exact(gas(2, 2.0)).value() - 2.0).abs() < 1e-12);
        assert!((z_exact(gas(3, 2.0)).value() - 6.0).abs() < 1e-12);
        assert!((z_exact(gas(2, 4.0)).value() - 6.0).abs() < 1e-11);
    }

    #[test]
    fn quadrature_examples() {
        assert_eq!(z_quadrature(gas(1, 3.0)).unwrap().log_value, 0.0);
        let z22 = z_quadrature(gas(2, 2.0)).unwrap().value();
        assert!((z22 / 2.0 - 1.0).abs() < 1e-4, "{z22}");
        let z24 = z_quadrature(gas(2, 4.0)).unwrap().value();
        assert!((z24 - 6.0).abs() < 1e-3, "{z24}");
        assert!(matches!(z_quadrature(gas(4, 2.0)), Err(Error::TooLarge(4))));
    }

    #[test]
    fn conditional_with_no_particles_is_one() {
        let spec = KernelSpec::new(
            Window::new(0.0, 1.0).unwrap(),
            2.0,
            InteractionModel::NonPeriodic,
            2.0,
            0,
            &PointConfiguration::empty(),
        )
        .unwrap();
        let z = z_conditional_estimate(&spec, 10, &mut chain_rng(0, 0, 0)).unwrap();
        assert_eq!(z.log_value, 0.0);
        assert_eq!(z.std_error, 0.0);
    }

    #[test]
    fn single_free_particle_has_unit_weight() {
        let spec = KernelSpec::new(
            Window::new(0.0, 1.0).unwrap(),
            2.0,
            InteractionModel::NonPeriodic,
            2.0,
            1,
            &PointConfiguration::empty(),
        )
        .unwrap();
        let z = z_conditional_estimate(&spec, 100, &mut chain_rng(1, 0, 0)).unwrap();
        assert!(z.log_value.abs() < 1e-15);
        assert!(z.std_error < 1e-15);
    }
}
