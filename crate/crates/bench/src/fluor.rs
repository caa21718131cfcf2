//! Rank-3 decomposition of a fluorescence excitation-emission tensor
//! (five mixtures × 201 emission × 61 excitation wavelengths).

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use qzcpd::cpd::{add_noise_with, decompose_any, factor_match_error, trial_rng, Method};
use qzcpd::tensor::io::read_tensor;
use qzcpd::{AnyTensor, CpdModel, DenseTensor, Mat};

use crate::error::{config, BenchError, Result};
use crate::record::{shape_label, Experiment, ExperimentRecord};
use crate::runner::{blank_record, fail, parallel_map, run_one, RunOptions};

pub const FLUORESCENCE_SHAPE: [usize; 3] = [5, 201, 61];
pub const FLUORESCENCE_RANK: usize = 3;

/// Loads the dataset from a tensor text file. Missing, unreadable,
/// complex or wrongly shaped files are reported as unavailable.
pub fn load_fluorescence(path: &Path) -> Result<DenseTensor<f64>> {
    let unavailable = |why: String| BenchError::DatasetUnavailable(format!("{}: {why}", path.display()));
    let file = File::open(path).map_err(|e| unavailable(e.to_string()))?;
    let t = read_tensor(BufReader::new(file)).map_err(|e| unavailable(e.to_string()))?;
    match t {
        AnyTensor::Real(t) if t.shape() == FLUORESCENCE_SHAPE => Ok(t),
        AnyTensor::Real(t) => Err(unavailable(format!(
            "expected shape {}, found {}",
            shape_label(&FLUORESCENCE_SHAPE),
            shape_label(t.shape())
        ))),
        AnyTensor::Complex(_) => Err(unavailable("expected a real tensor".into())),
    }
}

fn bump(x: f64, center: f64, width: f64) -> f64 {
    (-0.5 * ((x - center) / width).powi(2)).exp()
}

/// Noiseless rank-3 stand-in with the dataset's shape: smooth nonnegative
/// emission (250–450 nm) and excitation (240–300 nm) bands and fixed mixture
/// concentrations.
pub fn synthetic_fluorescence() -> (DenseTensor<f64>, CpdModel<f64>) {
    let conc = Mat::from_row_slice(
        5,
        3,
        &[1.0, 0.2, 0.5, 0.3, 1.0, 0.4, 0.6, 0.5, 1.0, 0.9, 0.8, 0.1, 0.2, 0.7, 0.9],
    );
    let emission_bands = [(350.0, 20.0), (303.0, 12.0), (282.0, 10.0)];
    let excitation_bands = [(280.0, 10.0), (275.0, 8.0), (258.0, 6.0)];
    let emission = Mat::from_fn(201, 3, |i, r| {
        let (c, w) = emission_bands[r];
        bump(250.0 + i as f64, c, w)
    });
    let excitation = Mat::from_fn(61, 3, |i, r| {
        let (c, w) = excitation_bands[r];
        bump(240.0 + i as f64, c, w)
    });
    let model = CpdModel::new(vec![conc, emission, excitation]).expect("consistent rank");
    let t = model.full().expect("valid model");
    (t, model)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluorConfig {
    pub snrs_db: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
}

/// One record per (SNR, trial, method). `error` is the relative mode-1
/// (concentration) factor error against the same method's decomposition of
/// the clean tensor, computed once per method.
pub fn run_fluorescence_experiment(
    clean: &DenseTensor<f64>,
    cfg: &FluorConfig,
    run: &RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    if cfg.trials == 0 || cfg.snrs_db.is_empty() || cfg.methods.is_empty() {
        return Err(config("need at least one trial, SNR and method"));
    }
    let rank = FLUORESCENCE_RANK;
    let shape = shape_label(clean.shape());
    let clean_any = AnyTensor::Real(clean.clone());
    let references: Vec<qzcpd::Result<CpdModel<_>>> = cfg
        .methods
        .iter()
        .map(|&m| decompose_any(&clean_any, rank, m, &run.cpd).map(|r| r.model.to_complex()))
        .collect();
    let jobs = cfg.snrs_db.len() * cfg.trials;
    let per_job = parallel_map(jobs, run.jobs, |job| {
        let snr = cfg.snrs_db[job / cfg.trials];
        let trial = job % cfg.trials;
        let mut rng = trial_rng(cfg.seed, job as u64);
        let noisy = add_noise_with(clean, snr, &mut rng).map(AnyTensor::Real);
        cfg.methods
            .iter()
            .zip(&references)
            .map(|(&m, reference)| {
                let mut rec = blank_record(Experiment::Fluorescence, m, shape.clone(), rank, snr, trial);
                let (noisy, reference) = match (&noisy, reference) {
                    (Ok(n), Ok(r)) => (n, r),
                    (Err(e), _) => {
                        fail(&mut rec, e);
                        return rec;
                    }
                    (_, Err(e)) => {
                        fail(&mut rec, e);
                        rec.status = format!("reference_{}", rec.status);
                        return rec;
                    }
                };
                let out = run_one(noisy, rank, m, run);
                rec.wall_time_s = out.wall_time_s;
                match out.result.and_then(|rep| {
                    rec.warnings.extend(rep.diagnostics.warnings.iter().cloned());
                    factor_match_error(reference, &rep.model.to_complex())
                }) {
                    Ok(mr) => rec.error = mr.per_factor[0],
                    Err(e) => fail(&mut rec, &e),
                }
                rec
            })
            .collect::<Vec<_>>()
    })?;
    Ok(per_job.into_iter().flatten().collect())
}
