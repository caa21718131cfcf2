//! Per-trial records and the `raw.csv` / `summary.csv` writers.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use qzcpd::cpd::Method;

use crate::error::{config, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Synthetic,
    Doa,
    Fluorescence,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Synthetic => "synthetic",
            Experiment::Doa => "doa",
            Experiment::Fluorescence => "fluorescence",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one method on one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: Experiment,
    pub method: Method,
    /// Tensor extents joined with `x`, e.g. `40x40x40x40`.
    pub shape: String,
    pub rank: usize,
    pub snr_db: f64,
    pub trial: usize,
    /// Factor error (synthetic, DOA) or mode-1 error (fluorescence); NaN on failure.
    pub error: f64,
    /// Mean relative azimuth error over the sources (DOA only).
    pub azimuth_error: Option<f64>,
    /// Mean relative elevation error over the sources (DOA only).
    pub elevation_error: Option<f64>,
    /// Largest absolute angle error in degrees (DOA only).
    pub max_angle_error_deg: Option<f64>,
    /// Wall time of the decomposition call; `None` when timing is disabled.
    pub wall_time_s: Option<f64>,
    /// `ok` or a failure tag.
    pub status: String,
    pub warnings: Vec<String>,
}

impl ExperimentRecord {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn shape_label(shape: &[usize]) -> String {
    shape.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// Median ignoring NaN entries (`NaN` when nothing is left). Even counts
/// average the two middle order statistics.
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Medians over the successful trials of one (experiment, shape, rank, SNR,
/// method) group.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub experiment: Experiment,
    pub method: Method,
    pub shape: String,
    pub rank: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub n_failed: usize,
    pub median_error: f64,
    pub median_azimuth_error: Option<f64>,
    pub median_elevation_error: Option<f64>,
    pub median_max_angle_error_deg: Option<f64>,
    pub median_wall_time_s: Option<f64>,
}

fn group_order(a: &ExperimentRecord, b: &ExperimentRecord) -> Ordering {
    a.experiment
        .cmp(&b.experiment)
        .then_with(|| a.shape.cmp(&b.shape))
        .then_with(|| a.rank.cmp(&b.rank))
        .then_with(|| a.snr_db.total_cmp(&b.snr_db))
        .then_with(|| a.method.cmp(&b.method))
}

fn median_opt(group: &[&ExperimentRecord], f: impl Fn(&ExperimentRecord) -> Option<f64>) -> Option<f64> {
    let present: Vec<f64> = group.iter().filter(|r| r.ok()).filter_map(|r| f(r)).collect();
    if group.iter().all(|r| f(r).is_none()) {
        None
    } else {
        Some(median(present))
    }
}

/// Groups records and takes medians; rows come out sorted by experiment,
/// shape, rank, SNR and method.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| group_order(a, b).then_with(|| a.trial.cmp(&b.trial)));
    sorted
        .chunk_by(|a, b| group_order(a, b) == Ordering::Equal)
        .map(|group| {
            let first = group[0];
            SummaryRow {
                experiment: first.experiment,
                method: first.method,
                shape: first.shape.clone(),
                rank: first.rank,
                snr_db: first.snr_db,
                trials: group.len(),
                n_failed: group.iter().filter(|r| !r.ok()).count(),
                median_error: median(group.iter().filter(|r| r.ok()).map(|r| r.error)),
                median_azimuth_error: median_opt(group, |r| r.azimuth_error),
                median_elevation_error: median_opt(group, |r| r.elevation_error),
                median_max_angle_error_deg: median_opt(group, |r| r.max_angle_error_deg),
                median_wall_time_s: median_opt(group, |r| r.wall_time_s),
            }
        })
        .collect()
}

/// Shortest round-trip representation (`1e-15`, `0.25`, `inf`, `NaN`).
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub const RAW_HEADER: [&str; 13] = [
    "experiment",
    "method",
    "shape",
    "rank",
    "snr_db",
    "trial",
    "error",
    "azimuth_error",
    "elevation_error",
    "max_angle_error_deg",
    "wall_time_s",
    "status",
    "warnings",
];

pub const SUMMARY_HEADER: [&str; 12] = [
    "experiment",
    "method",
    "shape",
    "rank",
    "snr_db",
    "trials",
    "n_failed",
    "median_error",
    "median_azimuth_error",
    "median_elevation_error",
    "median_max_angle_error_deg",
    "median_wall_time_s",
];

/// Writes `raw.csv` (records in the given order) and `summary.csv` into
/// `dir`, creating it if needed. Returns the two paths.
pub fn emit_summary(records: &[ExperimentRecord], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    if records.is_empty() {
        return Err(config("no records to summarize"));
    }
    fs::create_dir_all(dir)?;
    let raw_path = dir.join("raw.csv");
    let mut raw = csv::Writer::from_path(&raw_path)?;
    raw.write_record(RAW_HEADER)?;
    for r in records {
        raw.write_record([
            r.experiment.as_str().to_string(),
            r.method.as_str().to_string(),
            r.shape.clone(),
            r.rank.to_string(),
            num(r.snr_db),
            r.trial.to_string(),
            num(r.error),
            opt(r.azimuth_error),
            opt(r.elevation_error),
            opt(r.max_angle_error_deg),
            opt(r.wall_time_s),
            r.status.clone(),
            r.warnings.join("; "),
        ])?;
    }
    raw.flush()?;

    let summary_path = dir.join("summary.csv");
    let mut sum = csv::Writer::from_path(&summary_path)?;
    sum.write_record(SUMMARY_HEADER)?;
    for s in summarize(records) {
        sum.write_record([
            s.experiment.as_str().to_string(),
            s.method.as_str().to_string(),
            s.shape,
            s.rank.to_string(),
            num(s.snr_db),
            s.trials.to_string(),
            s.n_failed.to_string(),
            num(s.median_error),
            opt(s.median_azimuth_error),
            opt(s.median_elevation_error),
            opt(s.median_max_angle_error_deg),
            opt(s.median_wall_time_s),
        ])?;
    }
    sum.flush()?;
    Ok((raw_path, summary_path))
}
