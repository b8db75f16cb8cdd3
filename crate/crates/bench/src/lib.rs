//! Criterion benchmarks for the solvers in `freefit-core`; see `benches/`.
