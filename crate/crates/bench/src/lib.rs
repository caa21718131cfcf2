//! Benchmark harness for the `qzcpd` decompositions: synthetic rank and SNR
//! sweeps, direction-of-arrival retrieval and a fluorescence rank-3
//! decomposition, all writing `raw.csv` and `summary.csv`.

pub mod cli;
pub mod doa;
pub mod error;
pub mod fluor;
pub mod parse;
pub mod record;
pub mod runner;
pub mod synthetic;

pub use error::{BenchError, Result};
pub use record::{emit_summary, median, summarize, Experiment, ExperimentRecord, SummaryRow};
pub use runner::RunOptions;
