//! Benchmark-only crate; see `benches/emission.rs`.
