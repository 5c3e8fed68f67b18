//! Configuration, scenario presets and report writing for the `aleflow`
//! command-line tool.

pub mod config;
pub mod report;
pub mod scenario;

pub use config::{parse_config, render, RunConfig};
pub use report::Report;
pub use scenario::{execute, scenario, Outcome, RunError, SCENARIOS};
