//! Criterion benchmarks for `nclin-core` live under `benches/`.
