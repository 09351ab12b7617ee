//! Configuration and subcommands of the `besov-ns` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

pub use commands::Failure;
pub use config::{ConfigError, ExperimentConfig};
