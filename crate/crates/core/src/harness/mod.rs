//! Experiment drivers and the command line around them.

pub mod audit;
pub mod cli;
pub mod config;
pub mod eps_limit;
pub mod initial;
pub mod longterm;

pub use cli::{cli_main, run_cli};
pub use config::ExperimentConfig;
