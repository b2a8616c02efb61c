//! Criterion benchmarks for spanfl live under `benches/`.
