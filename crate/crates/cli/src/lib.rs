//! Command line pipeline around the `zinet` library: dataset registry and
//! download cache, aggregation, fitting, sampling, reports and timing runs.
//!
//! Every subcommand is a plain function here so it can be driven from tests;
//! the `zinet` binary only parses flags and maps errors to exit codes.

pub mod bench;
pub mod commands;
pub mod error;
pub mod fetch;
pub mod input;
pub mod registry;

pub use error::{CliError, Result};
