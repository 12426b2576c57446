//! The `kolchin` command line: commands over DSL documents, their reports,
//! and the bundled example suite.

pub mod commands;
pub mod report;
pub mod suite;

pub use commands::{execute, run_args, CliError, Cli, Command};
pub use report::{RunReport, Verdict, Witness};
