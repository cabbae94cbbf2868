use serde::Serialize;

use super::{MCEstimate, Welford};
use crate::config::{discrepancy, PointConfiguration, Window};
use crate::error::{Error, Result};
use crate::quad::integrate;

/// Discrepancy moments of one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyStats {
    pub window: Window,
    pub discr: MCEstimate,
    pub discr_sq: MCEstimate,
    /// `E[Discr²] / |Λ|` and its standard error.
    pub ratio: f64,
    pub ratio_se: f64,
}

pub fn discrepancy_stats(samples: &[PointConfiguration], windows: &[Window]) -> Result<Vec<DiscrepancyStats>> {
    windows
        .iter()
        .map(|w| {
            let (mut d1, mut d2) = (Welford::default(), Welford::default());
            for g in samples {
                let d = discrepancy(g, w).value();
                d1.push(d);
                d2.push(d * d);
            }
            let discr_sq = d2.estimate()?;
            Ok(DiscrepancyStats {
                window: *w,
                discr: d1.estimate()?,
                discr_sq,
                ratio: discr_sq.mean / w.length(),
                ratio_se: discr_sq.std_error / w.length(),
            })
        })
        .collect()
}

/// Probability of `B_p = {|γ_Λ| <= p, |γ_{Λ_p}| <= p²}`, `Λ_p = [-p/2, p/2]`.
pub fn overcrowding_probability(samples: &[PointConfiguration], inner: &Window, p: f64) -> Result<MCEstimate> {
    if !(p >= 0.0) {
        return Err(Error::InvalidParams(format!("p must be nonnegative, got {p}")));
    }
    let lambda_p = if p > 0.0 { Some(Window::centered(p)?) } else { None };
    let hits: Vec<f64> = samples
        .iter()
        .map(|g| {
            let inside = g.count_in(inner) as f64 <= p;
            let outer = lambda_p.map_or(0, |w| g.count_in(&w)) as f64 <= p * p;
            (inside && outer) as u8 as f64
        })
        .collect();
    MCEstimate::from_samples(&hits)
}

/// A function with known compact support, in the form read by
/// [`fluctuation_stat`].
pub struct TestFunction<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub support: Window,
}

/// `C²` bump `(1 - x²)³` on `[-1, 1]`.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - x * x).powi(3)
    }
}

/// `Fluct[φ_ℓ](γ) = Σ_{x∈γ} φ(x/ℓ) - ℓ ∫φ` sampled over `samples`.
///
/// `domain` is the region the samples live in; the rescaled support must fit
/// inside it.
pub fn fluctuation_stat(samples: &[PointConfiguration], phi: &TestFunction, ell: f64, domain: &Window) -> Result<MCEstimate> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidParams(format!("ell must be positive, got {ell}")));
    }
    let lo = ell * phi.support.lo();
    let hi = ell * phi.support.hi();
    if lo < domain.lo() || hi > domain.hi() {
        return Err(Error::SupportOverflow { lo, hi });
    }
    let mass = ell * integrate(|x| (phi.f)(x), phi.support.lo(), phi.support.hi(), 1e-12);
    let support = Window::new(lo, hi)?;
    let vals: Vec<f64> = samples
        .iter()
        .map(|g| g.restrict(&support).iter().map(|x| (phi.f)(x / ell)).sum::<f64>() - mass)
        .collect();
    MCEstimate::from_samples(&vals)
}

/// `C¹` plateau: 1 on `window`, smoothstep down to 0 over width `s` on each
/// side; `s = 0` gives the indicator.
pub fn plateau(window: &Window, s: f64, x: f64) -> f64 {
    if window.contains(x) {
        return 1.0;
    }
    let d = window.dist(x);
    if s <= 0.0 || d >= s {
        return 0.0;
    }
    let t = 1.0 - d / s;
    t * t * (3.0 - 2.0 * t)
}

/// Linear statistic `Σ φ_s(x)` at one smoothing scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityPoint {
    pub scale: f64,
    pub statistic: MCEstimate,
    /// Standard error of `statistic.variance`.
    pub variance_se: f64,
    #[serde(skip)]
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityCurve {
    pub window: Window,
    pub points: Vec<RigidityPoint>,
}

fn centered_squares(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let n = v.len() as f64;
    let bessel = if v.len() > 1 { n / (n - 1.0) } else { 1.0 };
    v.iter().map(|x| bessel * (x - m).powi(2)).collect()
}

impl RigidityCurve {
    /// Paired estimate of `Var_k - Var_{k+1}` and its standard error.
    pub fn variance_drop(&self, k: usize) -> (f64, f64) {
        let a = centered_squares(&self.points[k].values);
        let b = centered_squares(&self.points[k + 1].values);
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        match MCEstimate::from_samples(&d) {
            Ok(e) => (e.mean, e.std_error),
            Err(_) => (0.0, 0.0),
        }
    }

    /// Each step down exceeds `k_se` paired standard errors.
    pub fn strictly_decreasing(&self, k_se: f64) -> bool {
        (0..self.points.len().saturating_sub(1)).all(|k| {
            let (d, se) = self.variance_drop(k);
            d > k_se * se
        })
    }

    /// No step up is smaller than `-k_se` paired standard errors.
    pub fn nondecreasing(&self, k_se: f64) -> bool {
        (0..self.points.len().saturating_sub(1)).all(|k| {
            let (d, se) = self.variance_drop(k);
            -d >= -k_se * se
        })
    }
}

/// Variance of `Σ φ_s(x)` over samples for each smoothing scale.
pub fn rigidity_probe(samples: &[PointConfiguration], window: &Window, scales: &[f64]) -> Result<RigidityCurve> {
    if scales.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
        return Err(Error::InvalidParams("smoothing scales must be nonnegative".into()));
    }
    let points = scales
        .iter()
        .map(|&s| {
            let reach = Window::new(window.lo() - s, window.hi() + s)?;
            let values: Vec<f64> = samples
                .iter()
                .map(|g| g.restrict(&reach).iter().map(|x| plateau(window, s, x)).sum())
                .collect();
            let statistic = MCEstimate::from_samples(&values)?;
            let sq = centered_squares(&values);
            let variance_se = MCEstimate::from_samples(&sq)?.std_error;
            Ok(RigidityPoint {
                scale: s,
                statistic,
                variance_se,
                values,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RigidityCurve { window: *window, points })
}
