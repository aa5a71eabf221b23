//! Parallel Monte Carlo runner, file formats and CLI on top of `rmt-core`.
//!
//! `rmt sample | predict | verify | schur-check` write CSV tables, JSON
//! reports and a manifest next to every output. Outputs depend only on the
//! resolved config, never on the number of worker threads.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod runner;

pub use config::{FileConfig, Overrides, RunConfig};
pub use error::{CliError, Result};
