//! Benchmarks for the factorization pipeline; see `benches/pipeline.rs`.
