//! Criterion benchmarks for `robin-exterior`; see `benches/`.
