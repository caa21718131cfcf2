//! Direction-of-arrival retrieval on a uniform rectangular array.
//!
//! Slice `k` of the `M × M × K` observation tensor is `A·diag(s_k)·Eᵀ`, where
//! column `r` of `A` (resp. `E`) is the steering vector
//! `exp(i·m·(2π/λ)·sin(angle_r)·Δ)`, `m = 0..M`, of source `r`'s azimuth
//! (resp. elevation). A rank-`R` CPD returns `A` and `E` up to scaling and
//! permutation, and the angles follow from the phase slope of each column.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use qzcpd::cpd::{add_noise_with, assignment, factor_match_error, trial_rng, Method};
use qzcpd::{AnyTensor, Complex64, CpdModel, DenseTensor, Mat, Scalar};
use rand::Rng;
use thiserror::Error;

use crate::error::{config, Result};
use crate::record::{shape_label, Experiment, ExperimentRecord};
use crate::runner::{blank_record, fail, parallel_map, run_one, RunOptions};

/// Source azimuths of the reference scenario, in degrees.
pub const PAPER_AZIMUTHS: [f64; 8] = [15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 50.0, 55.0];
/// Source elevations of the reference scenario, in degrees.
pub const PAPER_ELEVATIONS: [f64; 8] = [5.0, 10.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0];

#[derive(Clone, Debug, PartialEq)]
pub struct DoaScenario {
    /// Sensors per side `M` of the `M × M` array.
    pub sensors: usize,
    /// Snapshots `K`.
    pub samples: usize,
    pub azimuths_deg: Vec<f64>,
    pub elevations_deg: Vec<f64>,
    pub wavelength: f64,
    pub spacing: f64,
    /// Keep only the first `K'` snapshots.
    pub slices: Option<usize>,
}

impl Default for DoaScenario {
    /// 20 × 20 array, 20 snapshots, eight sources, half-wavelength spacing.
    fn default() -> Self {
        DoaScenario {
            sensors: 20,
            samples: 20,
            azimuths_deg: PAPER_AZIMUTHS.to_vec(),
            elevations_deg: PAPER_ELEVATIONS.to_vec(),
            wavelength: 2.0,
            spacing: 1.0,
            slices: None,
        }
    }
}

impl DoaScenario {
    pub fn sources(&self) -> usize {
        self.azimuths_deg.len()
    }

    /// Snapshots actually used.
    pub fn used_samples(&self) -> usize {
        self.slices.unwrap_or(self.samples).min(self.samples)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.sources();
        if r == 0 || self.elevations_deg.len() != r {
            return Err(config(format!(
                "need one elevation per azimuth ({} azimuths, {} elevations)",
                r,
                self.elevations_deg.len()
            )));
        }
        if self.sensors < 2 || self.sensors * self.sensors < r || self.sensors < r {
            return Err(config(format!("{} sensors per side cannot resolve {r} sources", self.sensors)));
        }
        if self.samples == 0 || self.slices == Some(0) {
            return Err(config("need at least one snapshot"));
        }
        if !(self.wavelength > 0.0 && self.spacing > 0.0) {
            return Err(config("wavelength and spacing must be positive"));
        }
        Ok(())
    }

    fn steering(&self, angles_deg: &[f64]) -> Mat<Complex64> {
        let k = 2.0 * PI / self.wavelength * self.spacing;
        Mat::from_fn(self.sensors, angles_deg.len(), |m, r| {
            Complex64::from_polar(1.0, m as f64 * k * angles_deg[r].to_radians().sin())
        })
    }
}

/// Builds the observation tensor and its true factors `(A, E, S)` with
/// i.i.d. unit-variance circular Gaussian source samples.
pub fn doa_build_tensor<R: Rng + ?Sized>(
    s: &DoaScenario,
    rng: &mut R,
) -> Result<(DenseTensor<Complex64>, CpdModel<Complex64>)> {
    s.validate()?;
    let a = s.steering(&s.azimuths_deg);
    let e = s.steering(&s.elevations_deg);
    let src = Mat::from_fn(s.samples, s.sources(), |_, _| Complex64::standard_normal(rng) * FRAC_1_SQRT_2);
    let src = src.rows(0, s.used_samples()).into_owned();
    let truth = CpdModel::new(vec![a, e, src])?;
    let t = truth.full()?;
    Ok((t, truth))
}

#[derive(Clone, Copy, Debug, Error, PartialEq)]
#[error("phase slope gives sine {sine}, outside [-1, 1] (spatial aliasing)")]
pub struct AngleOutOfRange {
    pub sine: f64,
}

/// Angle in degrees from one steering-like column: the least-squares slope of
/// its unwrapped phase, built from the phases of consecutive-entry ratios.
pub fn estimate_angle(column: &[Complex64], wavelength: f64, spacing: f64) -> Result<f64, AngleOutOfRange> {
    let n = column.len();
    if n < 2 {
        return Ok(0.0);
    }
    let mut phase = Vec::with_capacity(n);
    phase.push(0.0);
    for w in column.windows(2) {
        let step = (w[1] * w[0].conj()).arg();
        phase.push(phase.last().unwrap() + step);
    }
    let mean_m = (n - 1) as f64 / 2.0;
    let mean_p = phase.iter().sum::<f64>() / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (m, p) in phase.iter().enumerate() {
        let dm = m as f64 - mean_m;
        num += dm * (p - mean_p);
        den += dm * dm;
    }
    let sine = num / den * wavelength / (2.0 * PI * spacing);
    if sine.abs() > 1.0 {
        return Err(AngleOutOfRange { sine });
    }
    Ok(sine.asin().to_degrees())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleEstimates {
    /// Estimates matched to the scenario's source order; `None` where the
    /// column aliased.
    pub azimuths_deg: Vec<Option<f64>>,
    pub elevations_deg: Vec<Option<f64>>,
    /// Absolute errors in degrees (NaN where the column aliased).
    pub azimuth_errors_deg: Vec<f64>,
    pub elevation_errors_deg: Vec<f64>,
    /// Sources whose matched column gave an out-of-range angle.
    pub out_of_range: Vec<usize>,
}

/// Penalty in degrees for matching a source to an aliased column.
const ALIASED_COST: f64 = 1e3;

fn relative(err: f64, truth: f64) -> f64 {
    if truth == 0.0 {
        err
    } else {
        err / truth.abs()
    }
}

impl AngleEstimates {
    pub fn mean_relative_azimuth_error(&self, s: &DoaScenario) -> f64 {
        mean_relative(&self.azimuth_errors_deg, &s.azimuths_deg)
    }

    pub fn mean_relative_elevation_error(&self, s: &DoaScenario) -> f64 {
        mean_relative(&self.elevation_errors_deg, &s.elevations_deg)
    }

    pub fn max_error_deg(&self) -> f64 {
        self.azimuth_errors_deg
            .iter()
            .chain(&self.elevation_errors_deg)
            .fold(0.0, |a, &b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
    }
}

/// Relative errors use `|truth|` as the scale, or 1 degree for a true angle of zero.
fn mean_relative(errs: &[f64], truth: &[f64]) -> f64 {
    errs.iter().zip(truth).map(|(&e, &t)| relative(e, t)).sum::<f64>() / errs.len() as f64
}

/// Estimates azimuths from factor 0 and elevations from factor 1 of `model`,
/// matching columns to sources by optimal assignment on the summed absolute
/// angle distance.
pub fn doa_estimate_angles(model: &CpdModel<Complex64>, s: &DoaScenario) -> Result<AngleEstimates> {
    let r = s.sources();
    if model.rank() != r || model.order() < 2 {
        return Err(config(format!(
            "model of rank {} and order {} does not fit {r} sources",
            model.rank(),
            model.order()
        )));
    }
    let column_angles = |f: &Mat<Complex64>| -> Vec<Option<f64>> {
        (0..r)
            .map(|c| estimate_angle(f.column(c).as_slice(), s.wavelength, s.spacing).ok())
            .collect()
    };
    let az = column_angles(model.factor(0));
    let el = column_angles(model.factor(1));
    let cost = Mat::from_fn(r, r, |i, c| match (az[c], el[c]) {
        (Some(a), Some(e)) => (a - s.azimuths_deg[i]).abs() + (e - s.elevations_deg[i]).abs(),
        _ => ALIASED_COST,
    });
    let perm = assignment(&cost);
    let pick = |v: &[Option<f64>]| perm.iter().map(|&c| v[c]).collect::<Vec<_>>();
    let (azimuths_deg, elevations_deg) = (pick(&az), pick(&el));
    let errs = |est: &[Option<f64>], truth: &[f64]| {
        est.iter()
            .zip(truth)
            .map(|(e, t)| e.map_or(f64::NAN, |e| (e - t).abs()))
            .collect::<Vec<_>>()
    };
    let out_of_range = (0..r)
        .filter(|&i| azimuths_deg[i].is_none() || elevations_deg[i].is_none())
        .collect();
    Ok(AngleEstimates {
        azimuth_errors_deg: errs(&azimuths_deg, &s.azimuths_deg),
        elevation_errors_deg: errs(&elevations_deg, &s.elevations_deg),
        azimuths_deg,
        elevations_deg,
        out_of_range,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoaConfig {
    pub scenario: DoaScenario,
    pub snrs_db: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
}

/// One record per (SNR, trial, method). `error` is the factor error against
/// `(A, E, S)`; the angle columns hold mean relative errors over the sources
/// and the largest absolute angle error.
pub fn run_doa_experiment(cfg: &DoaConfig, run: &RunOptions) -> Result<Vec<ExperimentRecord>> {
    let s = &cfg.scenario;
    s.validate()?;
    if cfg.trials == 0 || cfg.snrs_db.is_empty() || cfg.methods.is_empty() {
        return Err(config("need at least one trial, SNR and method"));
    }
    let rank = s.sources();
    let shape = shape_label(&[s.sensors, s.sensors, s.used_samples()]);
    let jobs = cfg.snrs_db.len() * cfg.trials;
    let per_job = parallel_map(jobs, run.jobs, |job| {
        let snr = cfg.snrs_db[job / cfg.trials];
        let trial = job % cfg.trials;
        let mut rng = trial_rng(cfg.seed, job as u64);
        let built = doa_build_tensor(s, &mut rng).and_then(|(t, truth)| {
            let noisy = add_noise_with(&t, snr, &mut rng)?;
            Ok((AnyTensor::Complex(noisy), truth))
        });
        cfg.methods
            .iter()
            .map(|&m| {
                let mut rec = blank_record(Experiment::Doa, m, shape.clone(), rank, snr, trial);
                let (noisy, truth) = match &built {
                    Ok(b) => b,
                    Err(e) => {
                        rec.status = "error".into();
                        rec.warnings.push(e.to_string());
                        return rec;
                    }
                };
                let out = run_one(noisy, rank, m, run);
                rec.wall_time_s = out.wall_time_s;
                let model = match out.result {
                    Ok(rep) => {
                        rec.warnings.extend(rep.diagnostics.warnings);
                        rep.model.to_complex()
                    }
                    Err(e) => {
                        fail(&mut rec, &e);
                        return rec;
                    }
                };
                match factor_match_error(truth, &model) {
                    Ok(mr) => rec.error = mr.max_rel_error,
                    Err(e) => {
                        fail(&mut rec, &e);
                        return rec;
                    }
                }
                match doa_estimate_angles(&model, s) {
                    Ok(est) => {
                        rec.azimuth_error = Some(est.mean_relative_azimuth_error(s));
                        rec.elevation_error = Some(est.mean_relative_elevation_error(s));
                        rec.max_angle_error_deg = Some(est.max_error_deg());
                        if !est.out_of_range.is_empty() {
                            rec.status = "angle_out_of_range".into();
                            rec.warnings.push(format!("aliased sources {:?}", est.out_of_range));
                        }
                    }
                    Err(e) => {
                        rec.status = "error".into();
                        rec.warnings.push(e.to_string());
                    }
                }
                rec
            })
            .collect::<Vec<_>>()
    })?;
    Ok(per_job.into_iter().flatten().collect())
}
