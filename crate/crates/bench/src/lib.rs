//! Benchmarks for the question answering pipeline live in `benches/`.
