//! Experiment orchestration: configuration, seeding, parallel trial
//! execution, statistics and persistence.

pub mod config;
pub mod record;
pub mod run;
pub mod seed;
pub mod stats;

pub use config::{parse_grid, Experiment, RunConfig};
pub use record::{read_jsonl, records_to_jsonl, write_outputs, Summary, Table, TrialRecord, SCHEMA_VERSION};
pub use run::{execute, resolve_workers, run_experiment, run_trial, RunOutput};
pub use seed::derive_seed;
pub use stats::ks_statistic;
