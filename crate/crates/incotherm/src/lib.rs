//! Scenario files, deterministic output formats and the `incotherm`
//! command-line front end on top of `incotherm-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod scenario;

pub use error::{CliError, CliResult};
