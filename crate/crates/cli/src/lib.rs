//! JSON formats, reports and the `fttc` command line on top of `fttc-core`.

pub mod commands;
pub mod format;
pub mod report;

pub use commands::{run, Cli, CliError};
