//! Criterion benchmarks for the filter and the closed-loop simulator.
