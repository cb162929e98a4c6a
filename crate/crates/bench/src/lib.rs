//! Criterion benchmarks for `tandem-core`. See `benches/`.
