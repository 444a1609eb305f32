//! Criterion benchmarks for besselkit live in `benches/`.
