//! Synthetic rank and SNR sweeps on random low-rank tensors.

use qzcpd::cpd::{add_noise_with, factor_match_error, trial_rng, Method};
use qzcpd::{AnyTensor, CpdModel, Mat};
use rand::Rng;

use crate::error::{config, Result};
use crate::record::{shape_label, Experiment, ExperimentRecord};
use crate::runner::{blank_record, fail, parallel_map, run_one, RunOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Tensor extents; the tensor order is `extents.len()`.
    pub extents: Vec<usize>,
    pub ranks: Vec<usize>,
    /// SNR points in dB; `f64::INFINITY` means noiseless.
    pub snrs_db: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Scale every true factor column to unit length.
    pub normalize: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.extents.len() < 3 {
            return Err(config("tensor order must be at least 3"));
        }
        if self.ranks.is_empty() || self.snrs_db.is_empty() || self.methods.is_empty() {
            return Err(config("rank, SNR and method lists must be nonempty"));
        }
        if self.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        let max_rank = *self.ranks.iter().max().unwrap_or(&0);
        if self.ranks.contains(&0) {
            return Err(config("ranks must be positive"));
        }
        if self.extents[..2].iter().any(|&e| e < max_rank) {
            return Err(config(format!(
                "the first two extents {:?} must be at least the largest rank {max_rank}",
                &self.extents[..2]
            )));
        }
        if self.extents.iter().any(|&e| e < 2) {
            return Err(config("every extent must be at least 2"));
        }
        if let Some(s) = self.snrs_db.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return Err(config(format!("invalid SNR {s}")));
        }
        Ok(())
    }
}

/// Random factors with i.i.d. uniform[0, 1] entries, optionally with unit
/// columns.
pub fn uniform_model<R: Rng + ?Sized>(rng: &mut R, extents: &[usize], rank: usize, normalize: bool) -> CpdModel<f64> {
    let factors = extents
        .iter()
        .map(|&e| {
            let mut f = Mat::from_fn(e, rank, |_, _| rng.random::<f64>());
            if normalize {
                for mut c in f.column_iter_mut() {
                    let n = c.norm();
                    if n > 0.0 {
                        c.unscale_mut(n);
                    }
                }
            }
            f
        })
        .collect();
    CpdModel::new(factors).expect("factors share the rank by construction")
}

/// One record per (rank, SNR, trial, method), in that nesting order. Every
/// method sees the same noisy tensor within a trial; a failing method yields
/// a record with `error = NaN` and its failure tag.
pub fn run_synthetic_sweep(cfg: &SweepConfig, run: &RunOptions) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let shape = shape_label(&cfg.extents);
    let points: Vec<(usize, f64)> = cfg
        .ranks
        .iter()
        .flat_map(|&r| cfg.snrs_db.iter().map(move |&s| (r, s)))
        .collect();
    let jobs = points.len() * cfg.trials;
    let per_job = parallel_map(jobs, run.jobs, |job| {
        let (rank, snr) = points[job / cfg.trials];
        let trial = job % cfg.trials;
        let mut rng = trial_rng(cfg.seed, job as u64);
        let truth = uniform_model(&mut rng, &cfg.extents, rank, cfg.normalize);
        let records = |f: &dyn Fn(&mut ExperimentRecord)| {
            cfg.methods
                .iter()
                .map(|&m| {
                    let mut rec = blank_record(Experiment::Synthetic, m, shape.clone(), rank, snr, trial);
                    f(&mut rec);
                    rec
                })
                .collect::<Vec<_>>()
        };
        let noisy = match truth.full().and_then(|t| add_noise_with(&t, snr, &mut rng)) {
            Ok(t) => AnyTensor::Real(t),
            Err(e) => return records(&|rec| fail(rec, &e)),
        };
        let truth_c = truth.to_complex();
        records(&|rec| {
            let out = run_one(&noisy, rank, rec.method, run);
            rec.wall_time_s = out.wall_time_s;
            match out.result.and_then(|rep| {
                rec.warnings.extend(rep.diagnostics.warnings.iter().cloned());
                factor_match_error(&truth_c, &rep.model.to_complex())
            }) {
                Ok(m) => rec.error = m.max_rel_error,
                Err(e) => fail(rec, &e),
            }
        })
    })?;
    Ok(per_job.into_iter().flatten().collect())
}
