//! Criterion benchmarks for the forensics toolkit live in `benches/`.
