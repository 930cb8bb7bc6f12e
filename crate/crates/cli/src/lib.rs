//! Scenario-driven frontend for the boundary-condition library: JSON
//! configuration in, CSV data and JSON summaries out, verification through
//! exit codes.

pub mod config;
pub mod error;
pub mod preset;
pub mod report;
pub mod run;
pub mod scenarios;

pub use config::{parse_config, parse_config_bytes, Config, Scenario, ScenarioBody};
pub use error::{CliError, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_PARSE, EXIT_VERIFY};
pub use run::{run_config, run_file, RunManifest, RunOptions};
