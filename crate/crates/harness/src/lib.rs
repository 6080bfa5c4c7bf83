//! Differential testing, benchmarks and command-line plumbing for the
//! compiler in `dbx-core`.

pub mod bench;
pub mod difftest;
pub mod fuzz;
