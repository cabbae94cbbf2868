use rand::Rng;
use serde::Serialize;

use crate::config::{PointConfiguration, Window};
use crate::energy::InteractionModel;
use crate::error::{Error, Result};
use crate::sampler::{chain_rng, GasParams};
use crate::sum::Compensated;

/// Grid used to locate the extrema of the exterior field over `Λ`.
const FIELD_GRID: usize = 129;

/// Empirical view of the small-truncation-error set.
///
/// For each radius `p` and sample `γ`, the sup over interior replacements `η`
/// of `|M_{Λ,Λ_n}(η,γ) - M_{Λ,Λ_p}(η,γ)|` is lower-bounded by a maximum over
/// a stratified trial set. Here `Λ_p = [-p/2, p/2]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationProfile {
    pub radii: Vec<f64>,
    /// Mean over samples of the estimated sup, per radius.
    pub sup_estimates: Vec<f64>,
    /// Largest estimated sup over samples, per radius.
    pub max_sup: Vec<f64>,
    pub delta: f64,
    pub fraction_within_delta: Vec<f64>,
    /// `per_sample[k][i]`: estimated sup for radius `k` and sample `i`.
    pub per_sample: Vec<Vec<f64>>,
}

impl TruncationProfile {
    pub fn n_samples(&self) -> usize {
        self.per_sample.first().map_or(0, Vec::len)
    }

    /// Paired mean and standard error of the change in the within-δ
    /// indicator from radius `k` to `k + 1`.
    pub fn fraction_step(&self, k: usize) -> (f64, f64) {
        let a = &self.per_sample[k];
        let b = &self.per_sample[k + 1];
        let d: Vec<f64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (y <= self.delta) as u8 as f64 - (x <= self.delta) as u8 as f64)
            .collect();
        let n = d.len() as f64;
        let mean = d.iter().sum::<f64>() / n;
        let var = if d.len() > 1 {
            d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, (var / n).sqrt())
    }

    /// No step down by more than `k_se` paired standard errors.
    pub fn is_nondecreasing(&self, k_se: f64) -> bool {
        (0..self.radii.len().saturating_sub(1)).all(|k| {
            let (m, se) = self.fraction_step(k);
            m >= -k_se * se
        })
    }
}

/// `Σ_{u ∈ ext} g_n(x - u)`.
fn field(model: InteractionModel, ext: &[f64], x: f64) -> f64 {
    ext.iter()
        .map(|&u| model.pair_potential(x - u))
        .collect::<Compensated>()
        .value()
}

/// `count` distinct points packed around `x` inside `w`.
fn cluster_at(x: f64, count: usize, w: &Window) -> Vec<f64> {
    let eps = 1e-9 * w.length();
    (0..count)
        .map(|j| {
            let off = eps * j as f64;
            if x + off <= w.hi() {
                x + off
            } else {
                x - off
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
enum Stratum {
    Uniform,
    ClusterLeft,
    ClusterRight,
    EndpointSplit,
    FieldMax,
    FieldMin,
}

const STRATA: [Stratum; 6] = [
    Stratum::FieldMax,
    Stratum::FieldMin,
    Stratum::EndpointSplit,
    Stratum::ClusterLeft,
    Stratum::ClusterRight,
    Stratum::Uniform,
];

fn trial<R: Rng + ?Sized>(
    stratum: Stratum,
    count: usize,
    w: &Window,
    argmax: f64,
    argmin: f64,
    rng: &mut R,
) -> Vec<f64> {
    let uniform_in = |lo: f64, hi: f64, rng: &mut R| (0..count).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let eighth = w.length() / 8.0;
    match stratum {
        Stratum::Uniform => uniform_in(w.lo(), w.hi(), rng),
        Stratum::ClusterLeft => uniform_in(w.lo(), w.lo() + eighth, rng),
        Stratum::ClusterRight => uniform_in(w.hi() - eighth, w.hi(), rng),
        Stratum::EndpointSplit => {
            let left = rng.random_range(0..=count);
            let mut pts = cluster_at(w.lo(), left, w);
            pts.extend(cluster_at(w.hi(), count - left, w));
            pts
        }
        Stratum::FieldMax => cluster_at(argmax, count, w),
        Stratum::FieldMin => cluster_at(argmin, count, w),
    }
}

/// Estimated sup of the truncation error for one sample and one radius.
fn sample_sup<R: Rng + ?Sized>(
    model: InteractionModel,
    gamma: &PointConfiguration,
    inner: &Window,
    lambda_p: &Window,
    trial_count: usize,
    rng: &mut R,
) -> f64 {
    let interior = gamma.restrict(inner);
    let ext = gamma.complement(lambda_p);
    if interior.is_empty() || ext.is_empty() {
        return 0.0;
    }
    let ext = ext.points();
    let base: f64 = interior.iter().map(|y| field(model, ext, y)).sum();
    let (mut argmax, mut argmin) = (inner.lo(), inner.lo());
    let (mut fmax, mut fmin) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..FIELD_GRID {
        let x = inner.lo() + inner.length() * k as f64 / (FIELD_GRID - 1) as f64;
        let v = field(model, ext, x);
        if v > fmax {
            fmax = v;
            argmax = x;
        }
        if v < fmin {
            fmin = v;
            argmin = x;
        }
    }
    let n = interior.len();
    (0..trial_count)
        .map(|t| {
            let eta = trial(STRATA[t % STRATA.len()], n, inner, argmax, argmin, rng);
            let s: f64 = eta.iter().map(|&e| field(model, ext, e)).sum();
            (s - base).abs()
        })
        .fold(0.0, f64::max)
}

/// Truncation-error profile of `samples` from `Q_{n,β}` over `radii`.
///
/// Trial sets for sample `i` come from stream `(i, 2)` of `seed`.
pub fn truncation_profile(
    params: GasParams,
    inner: Window,
    radii: &[f64],
    trial_count: usize,
    delta: f64,
    samples: &[PointConfiguration],
    seed: u64,
) -> Result<TruncationProfile> {
    let n = params.n as f64;
    if radii.is_empty() || radii.iter().any(|&p| !(p > 0.0 && p <= n)) {
        return Err(Error::InvalidSchedule(format!("radii must lie in (0, {n}]")));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSchedule("radii must be strictly increasing".into()));
    }
    if trial_count == 0 {
        return Err(Error::InvalidParams("trial_count must be positive".into()));
    }
    let windows: Vec<Window> = radii.iter().map(|&p| Window::centered(p)).collect::<Result<_>>()?;
    for w in &windows {
        inner.check_nested_in(w)?;
    }
    let model = params.model();
    let mut per_sample = vec![Vec::with_capacity(samples.len()); radii.len()];
    for (i, gamma) in samples.iter().enumerate() {
        let mut rng = chain_rng(seed, i as u64, 2);
        for (k, w) in windows.iter().enumerate() {
            per_sample[k].push(sample_sup(model, gamma, &inner, w, trial_count, &mut rng));
        }
    }
    let m = samples.len().max(1) as f64;
    let sup_estimates = per_sample.iter().map(|v| v.iter().sum::<f64>() / m).collect();
    let max_sup = per_sample.iter().map(|v| v.iter().copied().fold(0.0, f64::max)).collect();
    let fraction_within_delta = per_sample
        .iter()
        .map(|v| v.iter().filter(|&&s| s <= delta).count() as f64 / m)
        .collect();
    Ok(TruncationProfile {
        radii: radii.to_vec(),
        sup_estimates,
        max_sup,
        delta,
        fraction_within_delta,
        per_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::move_function;
    use crate::sampler::bernoulli_sample;

    #[test]
    fn full_radius_is_exactly_zero() {
        let params = GasParams::new(16, 2.0).unwrap();
        let mut rng = chain_rng(0, 0, 0);
        let samples: Vec<_> = (0..20)
            .map(|_| bernoulli_sample(16, &params.domain(), &mut rng))
            .collect();
        let prof = truncation_profile(params, Window::new(-1.0, 1.0).unwrap(), &[4.0, 16.0], 12, 0.1, &samples, 1)
            .unwrap();
        assert!(prof.per_sample[1].iter().all(|&s| s == 0.0));
        assert_eq!(prof.fraction_within_delta[1], 1.0);
        assert!(prof.sup_estimates.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn empty_annulus_gives_zero() {
        let params = GasParams::new(8, 2.0).unwrap();
        let gamma = PointConfiguration::new(vec![-1.5, -0.5, 0.2, 0.9, 1.5, 1.8, 1.9, 1.95]).unwrap();
        let prof = truncation_profile(params, Window::new(-1.0, 1.0).unwrap(), &[4.0], 12, 0.1, &[gamma], 1).unwrap();
        assert_eq!(prof.per_sample[0][0], 0.0);
    }

    #[test]
    fn trial_error_matches_move_function_difference() {
        let params = GasParams::new(16, 2.0).unwrap();
        let model = params.model();
        let mut rng = chain_rng(5, 0, 0);
        let gamma = bernoulli_sample(16, &params.domain(), &mut rng);
        let inner = Window::new(-2.0, 2.0).unwrap();
        let lambda_p = Window::centered(8.0).unwrap();
        let interior = gamma.restrict(&inner);
        let eta = bernoulli_sample(interior.len(), &inner, &mut rng);
        let full = move_function(model, &eta, &gamma, &inner, &params.domain()).unwrap();
        let trunc = move_function(model, &eta, &gamma, &inner, &lambda_p).unwrap();
        let ext = gamma.complement(&lambda_p);
        let direct: f64 = eta.iter().map(|e| field(model, ext.points(), e)).sum::<f64>()
            - interior.iter().map(|y| field(model, ext.points(), y)).sum::<f64>();
        // points exactly on ±p/2 belong to Λ_p in both computations
        assert!((full - trunc - direct).abs() < 1e-10);
    }

    #[test]
    fn radius_validation() {
        let params = GasParams::new(8, 2.0).unwrap();
        let w = Window::new(-1.0, 1.0).unwrap();
        assert!(truncation_profile(params, w, &[16.0], 4, 0.1, &[], 0).is_err());
        assert!(truncation_profile(params, w, &[4.0, 2.0], 4, 0.1, &[], 0).is_err());
        assert!(truncation_profile(params, w, &[1.0], 4, 0.1, &[], 0).is_err());
    }
}
