//! Criterion benchmarks for the `regstruct` crate; see `benches/`.
