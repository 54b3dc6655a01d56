//! Scenario files, claim expressions, generators and reports for the
//! `rwval` command-line tool.

pub mod claim;
pub mod commands;
pub mod error;
pub mod generate;
pub mod report;
pub mod scenario;

pub use error::{CliError, Result};
