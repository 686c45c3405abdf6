//! Shared helpers for the workspace benchmarks live in the bench targets.
