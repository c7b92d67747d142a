//! Experiment harness for `lcslab-core`: configs, replication records,
//! summaries and the `lcslab` command line.

pub mod config;
pub mod error;
pub mod harness;
pub mod records;

pub use config::{DistSpec, ExperimentConfig, Kind};
pub use error::{LabError, LabResult};
pub use harness::{resume, run_experiment, summarize, Reference, SummaryRow};
