//! Timing and parallel execution shared by the experiments.

use std::time::Instant;

use qzcpd::cpd::{decompose_any, AnyReport, CpdOptions, Method};
use qzcpd::AnyTensor;
use rayon::prelude::*;

use crate::error::{config, failure_tag, Result};
use crate::record::{Experiment, ExperimentRecord};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub cpd: CpdOptions,
    /// Record wall times. Disable for byte-identical output across runs.
    pub timing: bool,
    /// Worker threads for the trial loop; 0 lets rayon decide.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            cpd: CpdOptions::default(),
            timing: true,
            jobs: 1,
        }
    }
}

pub(crate) struct Outcome {
    pub result: qzcpd::Result<AnyReport>,
    pub wall_time_s: Option<f64>,
}

/// Runs one decomposition, timing only the decomposition call itself.
pub(crate) fn run_one(t: &AnyTensor, rank: usize, method: Method, run: &RunOptions) -> Outcome {
    let start = Instant::now();
    let result = decompose_any(t, rank, method, &run.cpd);
    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        result,
        wall_time_s: run.timing.then_some(elapsed),
    }
}

/// `f(0..n)` evaluated on `jobs` threads, results in index order.
pub(crate) fn parallel_map<T: Send>(n: usize, jobs: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| config(format!("cannot start worker threads: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

/// Record skeleton with every metric unset and status `ok`.
pub(crate) fn blank_record(
    experiment: Experiment,
    method: Method,
    shape: String,
    rank: usize,
    snr_db: f64,
    trial: usize,
) -> ExperimentRecord {
    ExperimentRecord {
        experiment,
        method,
        shape,
        rank,
        snr_db,
        trial,
        error: f64::NAN,
        azimuth_error: None,
        elevation_error: None,
        max_angle_error_deg: None,
        wall_time_s: None,
        status: "ok".into(),
        warnings: Vec::new(),
    }
}

/// Marks `rec` failed with the tag of `e`.
pub(crate) fn fail(rec: &mut ExperimentRecord, e: &qzcpd::Error) {
    rec.error = f64::NAN;
    rec.status = failure_tag(e).into();
    rec.warnings.push(e.to_string());
}
