//! Goodness-of-fit tests used by the statistical checks.

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of a KS statistic `d` from `n` samples (Stephens'
/// small-sample correction).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Upper-tail p-value of a χ² statistic (Wilson–Hilferty approximation).
pub fn chi_square_p_value(stat: f64, df: usize) -> f64 {
    let k = df as f64;
    let a = 2.0 / (9.0 * k);
    let z = ((stat / k).cbrt() - (1.0 - a)) / a.sqrt();
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Pearson χ² of observed counts against expected probabilities, pooling
/// cells whose expected count is below 5. Returns `(statistic, df)`.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, usize) {
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pool_o, mut pool_e) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total;
        if e < 5.0 {
            pool_o += o as f64;
            pool_e += e;
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if pool_e > 0.0 {
        stat += (pool_o - pool_e).powi(2) / pool_e;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_reference_values() {
        // Q_KS(1.36) ≈ 0.049, Q_KS(1.63) ≈ 0.0098
        assert!((ks_p_value(1.36 / 100.0, 10_000) - 0.049).abs() < 2e-3);
        assert!((ks_p_value(1.63 / 100.0, 10_000) - 0.0098).abs() < 1e-3);
        let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&grid, |x| x) <= 0.5e-3 + 1e-12);
    }

    #[test]
    fn chi_square_reference_values() {
        // 95th percentiles: df 10 → 18.307, df 50 → 67.505
        assert!((chi_square_p_value(18.307, 10) - 0.05).abs() < 3e-3);
        assert!((chi_square_p_value(67.505, 50) - 0.05).abs() < 2e-3);
        let (s, df) = chi_square(&[50, 50, 100], &[0.25, 0.25, 0.5]);
        assert_eq!((s, df), (0.0, 2));
    }
}
