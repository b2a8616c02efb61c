//! Experiment configuration, sweep execution and chart rendering behind the
//! `spanfl` binary.

pub mod config;
pub mod experiment;
pub mod lemma;
pub mod plot;
pub mod presets;

pub use config::{ConfigError, ExperimentSpec, FailureSetting};
pub use experiment::{run_experiment, RunReport};
