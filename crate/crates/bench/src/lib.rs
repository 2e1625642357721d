//! Benchmarks for `devassist-core` live under `benches/`.
