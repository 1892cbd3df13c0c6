//! Command-line front end for `bn-core`.
//!
//! The binary `bn` is a thin wrapper over [`commands::run`]; the replicated
//! fitting study lives in [`mc`] so it can also be driven from code.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod mc;

pub use args::Cli;
pub use error::{CliError, CliResult};
pub use mc::{run_mc_study, McStudyConfig, McStudyRow};
