//! Reproduction layer for `korteweg-core`: the bump and falling-film
//! scenarios, falling-film scales, run diagnostics, configuration files, CSV
//! output and the `korteweg` command line.

pub mod cli;
pub mod config;
pub mod csv_out;
pub mod diagnostics;
pub mod nondim;
pub mod runner;
pub mod scenario;

pub use korteweg_core;
