//! Command-line interface of the `qzcpd` binary.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qzcpd::cpd::{decompose_any, AnyModel, CpdOptions, Method, PencilStrategy};
use qzcpd::tensor::io::{read_tensor, write_matrix};

use crate::doa::{run_doa_experiment, DoaConfig, DoaScenario};
use crate::error::{config, BenchError, Result};
use crate::fluor::{load_fluorescence, run_fluorescence_experiment, synthetic_fluorescence, FluorConfig};
use crate::parse;
use crate::record::{emit_summary, summarize, ExperimentRecord};
use crate::runner::RunOptions;
use crate::synthetic::{run_synthetic_sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "qzcpd", version, about = "Algebraic CPD via QZ: decomposition and benchmark sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank and SNR sweep on random low-rank tensors.
    Sweep(SweepArgs),
    /// Direction-of-arrival retrieval on a uniform rectangular array.
    Doa(DoaArgs),
    /// Rank-3 decomposition of the fluorescence tensor (or its synthetic stand-in).
    Fluor(FluorArgs),
    /// Decompose one tensor file and write one factor file per mode.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Normalize {
    Columns,
    None,
}

#[derive(Debug, Args)]
pub struct CpdArgs {
    /// Pencil construction: `first` (first two core slices) or `random:SEED`.
    #[arg(long, default_value = "first", value_parser = parse_pencil)]
    pub pencil: PencilStrategy,
    /// Zero-based CPDQZS pivot mode (at least 2); defaults to the last mode.
    #[arg(long)]
    pub pivot_mode: Option<usize>,
    /// Retry real tensors in complex arithmetic when the pencil has complex eigenvalues.
    #[arg(long, value_enum, default_value = "off")]
    pub complex_fallback: Switch,
}

impl CpdArgs {
    fn options(&self) -> CpdOptions {
        CpdOptions {
            pencil: self.pencil,
            pivot_mode: self.pivot_mode,
            complex_fallback: self.complex_fallback == Switch::On,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub cpd: CpdArgs,
    /// Comma-separated methods.
    #[arg(long, default_value = "cpdqz,cpdqzs,gevd")]
    pub methods: String,
    /// Master seed; every trial draws from its own stream of it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for raw.csv and summary.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (0 = all cores). Parallel trials distort wall times.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Leave wall-time columns empty so reruns produce identical files.
    #[arg(long)]
    pub no_timing: bool,
}

impl RunArgs {
    fn run_options(&self) -> RunOptions {
        RunOptions {
            cpd: self.cpd.options(),
            timing: !self.no_timing,
            jobs: self.jobs,
        }
    }

    fn methods(&self) -> Result<Vec<Method>> {
        parse::method_list(&self.methods).map_err(config)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Extents: one value for all modes, or `I1,I2,...` / `I1xI2x...`.
    #[arg(long, default_value = "40")]
    pub dims: String,
    /// Fixed rank.
    #[arg(long, conflicts_with = "rank_range")]
    pub rank: Option<usize>,
    /// Ranks as `A:B`, `A:B:STEP` or `R1,R2,...`.
    #[arg(long)]
    pub rank_range: Option<String>,
    /// Fixed SNR in dB (`inf` for noiseless).
    #[arg(long, conflicts_with = "snr_range")]
    pub snr: Option<String>,
    /// SNRs as `A:B:STEP` or `S1,S2,...` (dB, `inf` allowed).
    #[arg(long)]
    pub snr_range: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Column scaling of the true factors.
    #[arg(long, value_enum, default_value = "columns")]
    pub normalize: Normalize,
}

#[derive(Debug, Args)]
pub struct DoaArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Fixed SNR in dB (`inf` for noiseless).
    #[arg(long, conflicts_with = "snr_range")]
    pub snr: Option<String>,
    /// SNRs as `A:B:STEP` or `S1,S2,...`.
    #[arg(long)]
    pub snr_range: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Sensors per side of the square array.
    #[arg(long, default_value_t = 20)]
    pub sensors: usize,
    /// Snapshots.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Use only the first K' snapshots.
    #[arg(long)]
    pub slices: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub wavelength: f64,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
}

#[derive(Debug, Args)]
pub struct FluorArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Dataset in the tensor text format (5 x 201 x 61, real). Without it the
    /// synthetic stand-in is used.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Fixed SNR in dB.
    #[arg(long, conflicts_with = "snr_range")]
    pub snr: Option<String>,
    /// SNRs as `A:B:STEP` or `S1,S2,...`.
    #[arg(long)]
    pub snr_range: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub cpd: CpdArgs,
    /// Input tensor file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value = "cpdqzs")]
    pub method: Method,
    /// Directory for `factor_<n>.txt`, one per mode (zero-based).
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_pencil(s: &str) -> std::result::Result<PencilStrategy, String> {
    s.parse()
}

fn snrs(fixed: &Option<String>, range: &Option<String>, default: &str) -> Result<Vec<f64>> {
    let s = fixed.as_deref().or(range.as_deref()).unwrap_or(default);
    parse::snr_list(s).map_err(config)
}

fn finish(records: &[ExperimentRecord], out: &Path, echo: &str) -> Result<()> {
    let (raw, summary) = emit_summary(records, out)?;
    fs::write(out.join("run.txt"), echo)?;
    let failed = records.iter().filter(|r| !r.ok()).count();
    println!("{} records ({failed} failed)", records.len());
    for s in summarize(records) {
        println!(
            "{:<8} rank {:>3} snr {:>6} dB  median error {:.3e}  failed {}/{}",
            s.method, s.rank, s.snr_db, s.median_error, s.n_failed, s.trials
        );
    }
    println!("wrote {} and {}", raw.display(), summary.display());
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let extents = parse::dims(&a.dims, a.order).map_err(config)?;
    let ranks = match (a.rank, &a.rank_range) {
        (Some(r), _) => vec![r],
        (None, Some(s)) => parse::usize_list(s).map_err(config)?,
        (None, None) => vec![10],
    };
    let cfg = SweepConfig {
        extents,
        ranks,
        snrs_db: snrs(&a.snr, &a.snr_range, "40")?,
        trials: a.trials,
        methods: a.run.methods()?,
        seed: a.run.seed,
        normalize: a.normalize == Normalize::Columns,
    };
    let records = run_synthetic_sweep(&cfg, &a.run.run_options())?;
    finish(&records, &a.run.out, &format!("{cfg:#?}\n{:#?}\n", a.run.run_options()))
}

fn doa(a: &DoaArgs) -> Result<()> {
    let cfg = DoaConfig {
        scenario: DoaScenario {
            sensors: a.sensors,
            samples: a.samples,
            wavelength: a.wavelength,
            spacing: a.spacing,
            slices: a.slices,
            ..DoaScenario::default()
        },
        snrs_db: snrs(&a.snr, &a.snr_range, "0,10,20,30,40")?,
        trials: a.trials,
        methods: a.run.methods()?,
        seed: a.run.seed,
    };
    let records = run_doa_experiment(&cfg, &a.run.run_options())?;
    finish(&records, &a.run.out, &format!("{cfg:#?}\n{:#?}\n", a.run.run_options()))
}

fn fluor(a: &FluorArgs) -> Result<()> {
    let (tensor, source) = match &a.data {
        Some(path) => (load_fluorescence(path)?, path.display().to_string()),
        None => {
            eprintln!("no --data given; using the synthetic 5x201x61 stand-in");
            (synthetic_fluorescence().0, "synthetic stand-in".to_string())
        }
    };
    let cfg = FluorConfig {
        snrs_db: snrs(&a.snr, &a.snr_range, "20")?,
        trials: a.trials,
        methods: a.run.methods()?,
        seed: a.run.seed,
    };
    let records = run_fluorescence_experiment(&tensor, &cfg, &a.run.run_options())?;
    finish(
        &records,
        &a.run.out,
        &format!("data: {source}\n{cfg:#?}\n{:#?}\n", a.run.run_options()),
    )
}

fn write_factors<T: qzcpd::Scalar>(factors: &[qzcpd::Mat<T>], out: &Path) -> Result<()> {
    for (n, f) in factors.iter().enumerate() {
        let mut w = BufWriter::new(File::create(out.join(format!("factor_{n}.txt")))?);
        write_matrix(&mut w, f)?;
        w.flush()?;
    }
    Ok(())
}

fn decompose(a: &DecomposeArgs) -> Result<()> {
    let file = File::open(&a.input).map_err(|e| config(format!("{}: {e}", a.input.display())))?;
    let t = read_tensor(BufReader::new(file)).map_err(|e| config(format!("{}: {e}", a.input.display())))?;
    let rep = decompose_any(&t, a.rank, a.method, &a.cpd.options()).map_err(|e| match e {
        qzcpd::Error::InvalidArgument(_) | qzcpd::Error::OrderMismatch { .. } | qzcpd::Error::DimMismatch(_) => {
            config(e.to_string())
        }
        e => BenchError::Numerical(e),
    })?;
    fs::create_dir_all(&a.out)?;
    match &rep.model {
        AnyModel::Real(m) => write_factors(m.factors(), &a.out)?,
        AnyModel::Complex(m) => write_factors(m.factors(), &a.out)?,
    }
    let d = &rep.diagnostics;
    eprintln!(
        "{}: core {:?}, pencil {}, {} QZ sweeps, worst rank-1 residual {:.3e}",
        rep.method,
        d.core_shape,
        d.pencil,
        d.qz_sweeps,
        d.rank1_residuals.iter().copied().fold(0.0, f64::max)
    );
    for w in &d.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} factor files to {}", rep.model.to_complex().order(), a.out.display());
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Doa(a) => doa(a),
        Command::Fluor(a) => fluor(a),
        Command::Decompose(a) => decompose(a),
    }
}
