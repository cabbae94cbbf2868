use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use loggas_core::energy::move_function_limit;
use loggas_core::sampler::{chain_rng, resample_interior, LogGasChain};
use loggas_core::{GasParams, InteractionModel, PointConfiguration, Window};

fn gas_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("gas_step");
    for n in [64usize, 512, 2048] {
        let params = GasParams::new(n, 2.0).unwrap();
        let mut chain = LogGasChain::new(params, chain_rng(0, 0, 0));
        group.bench_with_input(BenchmarkId::new("incremental", n), &n, |b, _| b.iter(|| chain.step()));
        // what each step would cost if the energy were recomputed from scratch
        group.bench_with_input(BenchmarkId::new("full_recompute", n), &n, |b, _| {
            b.iter(|| black_box(chain.recompute_energy()))
        });
    }
    group.finish();
}

fn gas_sweep(c: &mut Criterion) {
    let params = GasParams::new(512, 2.0).unwrap();
    let mut chain = LogGasChain::new(params, chain_rng(1, 0, 0));
    c.bench_function("gas_sweep_n512", |b| b.iter(|| chain.sweep()));
}

fn kernel_resample(c: &mut Criterion) {
    let n = 64u32;
    let half = n as f64 / 2.0;
    let gamma = PointConfiguration::new((0..n).map(|k| -half + k as f64 + 0.37).collect()).unwrap();
    let model = InteractionModel::periodic(n).unwrap();
    let inner = Window::new(-2.0, 2.0).unwrap();
    let mut rng = chain_rng(2, 0, 1);
    c.bench_function("kernel_resample_n64_4pts_1000steps", |b| {
        b.iter(|| resample_interior(&gamma, inner, half, model, 2.0, Some(1000), &mut rng).unwrap())
    });
}

fn move_limit(c: &mut Criterion) {
    let inner = Window::new(-1.0, 1.0).unwrap();
    let gamma = PointConfiguration::new((-4096..4096).map(|k| k as f64 + 0.5).collect()).unwrap();
    let eta = PointConfiguration::new(vec![-0.2, 0.9]).unwrap();
    let schedule: Vec<f64> = (2..=12).map(|k| 2f64.powi(k)).collect();
    c.bench_function("move_function_limit_8192", |b| {
        b.iter(|| move_function_limit(&eta, &gamma, &inner, &schedule, 1e-6).unwrap())
    });
}

criterion_group!(benches, gas_step, gas_sweep, kernel_resample, move_limit);
criterion_main!(benches);
