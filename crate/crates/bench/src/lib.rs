//! Criterion benchmarks for the fusion pipeline live under `benches/`.
