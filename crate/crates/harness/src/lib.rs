//! Experiment runner for the transport legs: TOML-configured sweeps, long
//! format CSV and json-lines records, verdicts, and the acceptance suite.

pub mod cli;
pub mod config;
pub mod criteria;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod report;
pub mod run;
pub mod tolerances;

pub use error::{HarnessError, Result};
