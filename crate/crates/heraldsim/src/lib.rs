//! Command-line companion to `heraldsim-core`: the run configuration format,
//! CSV and PGM output, and the command implementations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod selftest;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, ConfigError};
