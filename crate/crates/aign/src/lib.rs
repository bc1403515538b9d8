//! Experiment harness for the additive inverse Gaussian noise channel:
//! layered configuration, parallel sweeps, and CSV output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use cli::{execute, run, Cli, Output};
pub use error::{CliError, Result};
