//! Benchmarks for the tautological calculator live under `benches/`.
