//! Benchmark registry, experiment configs, reproduction suites and the
//! `gaspp` command line on top of `gaspp-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod registry;
pub mod reproduce;

pub use config::{load_config, ExperimentConfig, GameSpec, LearnerSpec};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Summary};
pub use registry::{BenchmarkEntry, BenchmarkGame};
pub use reproduce::{reproduce, Suite, SuiteReport};
