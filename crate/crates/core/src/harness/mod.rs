//! Experiment orchestration: scheme grids, Monte-Carlo replication,
//! design-quality replays, and result files.

pub mod cli;
pub mod config;
pub mod design;
pub mod experiment;
pub mod output;
pub mod tpo_table;

pub use config::{ExperimentConfig, Problem};
pub use design::run_design_quality;
pub use experiment::{run_experiment, ResultTable, Scheme, SchemeSummary};
pub use output::write_records;
pub use tpo_table::{tpo_cell, tpo_table, TpoCell};
