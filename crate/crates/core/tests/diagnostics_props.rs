use loggas_core::diagnostics::{
    campbell_estimate, dlr_residual, overcrowding_probability, paired_difference, DlrOptions, MCEstimate,
    DEFAULT_TUPLE_CAP,
};
use loggas_core::sampler::{chain_rng, loggas_mcmc, poisson_sample};
use loggas_core::{GasParams, PointConfiguration, Schedule, Window};
use rand::Rng;

/// Three states; state 2 is alone in its block, states 0 and 1 share one. The
/// kernel redraws from the stationary law restricted to the current block.
#[test]
fn paired_estimator_is_unbiased_for_every_inner_count() {
    let pi = [0.2, 0.5, 0.3];
    let f = [1.7, -0.4, 2.2];
    let block = |x: usize| if x == 2 { vec![2] } else { vec![0, 1] };
    let kernel = |x: usize, y: usize| {
        let b = block(x);
        if b.contains(&y) {
            pi[y] / b.iter().map(|&z| pi[z]).sum::<f64>()
        } else {
            0.0
        }
    };
    for k in 1..=4 {
        let mut expectation = 0.0;
        for x in 0..3 {
            let mut tuple = vec![0usize; k];
            loop {
                let prob: f64 = tuple.iter().map(|&y| kernel(x, y)).product();
                if prob > 0.0 {
                    let vals: Vec<f64> = tuple.iter().map(|&y| f[y]).collect();
                    expectation += pi[x] * prob * paired_difference(f[x], &vals);
                }
                let mut i = 0;
                while i < k && tuple[i] == 2 {
                    tuple[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
                tuple[i] += 1;
            }
        }
        assert!(expectation.abs() < 1e-14, "K = {k}: {expectation}");
    }
}

#[test]
fn standard_error_scales_with_sample_count() {
    let mut rng = chain_rng(300, 0, 0);
    let xs: Vec<f64> = (0..40_000).map(|_| rng.random::<f64>().powi(3)).collect();
    let full = MCEstimate::from_samples(&xs).unwrap();
    for half in [&xs[..20_000], &xs[20_000..]] {
        let h = MCEstimate::from_samples(half).unwrap();
        let ratio = h.std_error / full.std_error;
        let target = 2f64.sqrt();
        assert!(ratio > target / 1.5 && ratio < target * 1.5, "{ratio}");
    }
}

#[test]
fn smooth_statistic_has_small_dlr_residual() {
    let params = GasParams::new(8, 2.0).unwrap();
    let inner = Window::new(-1.0, 1.0).unwrap();
    let phi = |x: f64| if x.abs() < 1.0 { 0.8 * (1.0 - x * x).powi(2) } else { 0.0 };
    let f = move |g: &PointConfiguration| (-g.iter().map(phi).sum::<f64>()).exp();
    let schedule = Schedule::new(8 * 1000 + 8 * 10 * 1500, 8 * 1000, 80).unwrap();
    let e = dlr_residual(f, params, inner, 4.0, 2, &schedule, &DlrOptions::default(), 301, 1).unwrap();
    assert_eq!(e.n_samples, 3000);
    assert!(e.within(0.0, 3.0), "{e:?}");
    assert!(e.std_error < 0.01);
}

#[test]
fn campbell_order_one_recovers_poisson_intensity() {
    let b = Window::new(0.0, 1.0).unwrap();
    let big = Window::new(-3.0, 4.0).unwrap();
    let mut rng = chain_rng(302, 0, 0);
    let samples: Vec<_> = (0..20_000).map(|_| poisson_sample(1.0, &big, &mut rng).unwrap()).collect();
    let ind = |x: &[f64], _: &PointConfiguration| b.contains(x[0]) as u8 as f64;
    let c = campbell_estimate(&samples, 1, ind, &b, DEFAULT_TUPLE_CAP).unwrap();
    assert!(c.test_statistic_mean.within(1.0, 3.0), "{:?}", c.test_statistic_mean);
    let mean_count = samples.iter().map(|g| g.count_in(&b) as f64).sum::<f64>() / samples.len() as f64;
    assert!((c.test_statistic_mean.mean - mean_count).abs() < 1e-12);
}

#[test]
fn overcrowding_is_rare_for_large_p() {
    let params = GasParams::new(256, 2.0).unwrap();
    let n = 256u64;
    let schedule = Schedule::new(n * 2000 + n * 5 * 400, n * 2000, n * 5).unwrap();
    let out = loggas_mcmc(params, &schedule, chain_rng(303, 0, 0));
    let inner = Window::new(-1.0, 1.0).unwrap();
    for p in [16.0, 32.0] {
        let e = overcrowding_probability(&out.samples, &inner, p).unwrap();
        assert!(e.mean >= 0.99, "p = {p}: {e:?}");
    }
    let all = overcrowding_probability(&out.samples, &inner, 256.0).unwrap();
    assert_eq!(all.mean, 1.0);
    let p0 = overcrowding_probability(&out.samples, &inner, 0.0).unwrap();
    let empty = out.samples.iter().filter(|g| g.count_in(&inner) == 0).count() as f64 / out.samples.len() as f64;
    assert!((p0.mean - empty).abs() < 1e-15);
}
