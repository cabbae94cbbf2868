use serde::Serialize;

use super::{MCEstimate, Welford};
use crate::config::{PointConfiguration, Window};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CampbellEstimate {
    pub order: usize,
    pub test_statistic_mean: MCEstimate,
}

/// Default per-sample cap on the number of enumerated tuples.
pub const DEFAULT_TUPLE_CAP: u128 = 10_000_000;

fn falling_factorial(m: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((m - i) as u128))
}

/// `Σ h(x, γ∖x)` over ordered tuples `x` of `order` distinct points of
/// `gamma` lying in `support`.
pub fn campbell_sum<H>(gamma: &PointConfiguration, order: usize, h: &H, support: &Window, cap: u128) -> Result<f64>
where
    H: Fn(&[f64], &PointConfiguration) -> f64,
{
    let pts = gamma.points();
    let idx: Vec<usize> = (0..pts.len()).filter(|&i| support.contains(pts[i])).collect();
    if idx.len() < order {
        return Ok(0.0);
    }
    let count = falling_factorial(idx.len(), order);
    if count > cap {
        return Err(Error::CombinatorialBlowup { count, cap });
    }
    let mut chosen = Vec::with_capacity(order);
    let mut used = vec![false; pts.len()];
    let mut total = 0.0;
    enumerate(pts, &idx, order, &mut chosen, &mut used, h, &mut total);
    Ok(total)
}

fn enumerate<H>(
    pts: &[f64],
    idx: &[usize],
    order: usize,
    chosen: &mut Vec<f64>,
    used: &mut [bool],
    h: &H,
    total: &mut f64,
) where
    H: Fn(&[f64], &PointConfiguration) -> f64,
{
    if chosen.len() == order {
        let rest: Vec<f64> = pts.iter().zip(used.iter()).filter(|(_, &u)| !u).map(|(&x, _)| x).collect();
        *total += h(chosen, &PointConfiguration::from_sorted_unchecked(rest));
        return;
    }
    for &i in idx {
        if used[i] {
            continue;
        }
        used[i] = true;
        chosen.push(pts[i]);
        enumerate(pts, idx, order, chosen, used, h, total);
        chosen.pop();
        used[i] = false;
    }
}

/// Empirical Campbell measure of order `order` applied to `h`, whose tuple
/// argument is supported in `support`.
pub fn campbell_estimate<H>(
    samples: &[PointConfiguration],
    order: usize,
    h: H,
    support: &Window,
    cap: u128,
) -> Result<CampbellEstimate>
where
    H: Fn(&[f64], &PointConfiguration) -> f64,
{
    if order < 1 {
        return Err(Error::InvalidParams("Campbell order must be at least 1".into()));
    }
    let mut acc = Welford::default();
    for g in samples {
        acc.push(campbell_sum(g, order, &h, support, cap)?);
    }
    Ok(CampbellEstimate {
        order,
        test_statistic_mean: acc.estimate()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[f64]) -> PointConfiguration {
        PointConfiguration::new(v.to_vec()).unwrap()
    }

    #[test]
    fn order_one_indicator_is_mean_count() {
        let b = Window::new(0.0, 1.0).unwrap();
        let samples = vec![cfg(&[-0.5, 0.2, 0.7]), cfg(&[]), cfg(&[0.9, 3.0])];
        let e = campbell_estimate(&samples, 1, |x: &[f64], _: &PointConfiguration| if b.contains(x[0]) { 1.0 } else { 0.0 }, &b, 100)
            .unwrap();
        let direct = samples.iter().map(|g| g.count_in(&b) as f64).sum::<f64>() / 3.0;
        assert_eq!(e.test_statistic_mean.mean, direct);
    }

    #[test]
    fn order_two_needs_two_points() {
        let w = Window::new(-10.0, 10.0).unwrap();
        let one = |_: &[f64], _: &PointConfiguration| 1.0;
        assert_eq!(campbell_sum(&cfg(&[0.5]), 2, &one, &w, 100).unwrap(), 0.0);
        assert_eq!(campbell_sum(&cfg(&[0.5, 1.0, 2.0]), 2, &one, &w, 100).unwrap(), 6.0);
    }

    #[test]
    fn remainder_excludes_the_tuple() {
        let w = Window::new(-10.0, 10.0).unwrap();
        let h = |x: &[f64], rest: &PointConfiguration| {
            assert!(!rest.iter().any(|r| x.contains(&r)));
            rest.len() as f64
        };
        assert_eq!(campbell_sum(&cfg(&[0.0, 1.0, 2.0, 3.0]), 2, &h, &w, 100).unwrap(), 24.0);
    }

    #[test]
    fn cap_is_enforced() {
        let w = Window::new(-100.0, 100.0).unwrap();
        let g = cfg(&(0..30).map(|k| k as f64).collect::<Vec<_>>());
        let one = |_: &[f64], _: &PointConfiguration| 1.0;
        assert!(matches!(
            campbell_sum(&g, 3, &one, &w, 1000),
            Err(Error::CombinatorialBlowup { count: 24_360, cap: 1000 })
        ));
        assert!(campbell_estimate(&[g], 0, one, &w, 10).is_err());
    }
}
