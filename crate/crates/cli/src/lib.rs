//! Experiment harness and report emission for the `asketch` command line.

pub mod cli;
pub mod compare;
pub mod config;
pub mod data;
pub mod error;
pub mod report;
pub mod sweep;

pub use error::{CliError, Result};
