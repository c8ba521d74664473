//! Scenario runner for the kicked-top simulator: run configuration, CSV
//! artifacts, curve fitting, recurrence analysis and the `qkt` command line.

pub mod analysis;
pub mod app;
pub mod check;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod reproduce;

pub use config::{EnsembleSpec, InitialState, Placement, RunConfig};
pub use error::{CliError, Result};
