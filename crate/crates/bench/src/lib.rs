//! Criterion benchmarks for `radaim-core`; see `benches/solvers.rs`.
