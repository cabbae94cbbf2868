//! Criterion benchmarks for the sampler core; see `benches/`.
