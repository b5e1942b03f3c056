//! File formats, configuration and commands for the `edgemig` tool.
//!
//! The algorithms live in [`edgemig_core`]; this crate reads TOML run
//! configs and GPS traces, runs the solvers and writes CSV/JSON results.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod traces;

pub use error::{AppError, EXIT_CONVERGENCE, EXIT_DEGENERATE, EXIT_IO, EXIT_VALIDATION};
