//! CPD algorithms on top of the tensor and matrix kernels.
//!
//! All three methods share the same front end: MLSVD compression to
//! `R × R × min(I_2, R) × …` followed by a two-matrix pencil taken from the
//! core. [`cpdqz`] reads every factor of mode ≥ 2 off the diagonal of the
//! QZ-triangularized core and recovers the first two by one Khatri-Rao solve;
//! [`cpdqzs`] reads only a single pivot factor and peels the rest from
//! rank-1 approximations; [`gevd`] is the generalized-eigenvector baseline.

mod algorithms;
mod matching;
mod mlsvd;
mod noise;
mod pencil;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use algorithms::{
    compress_for_rank, cpdqz, cpdqzs, extract_diag_factor, extract_diag_factors, gevd,
    recover_first_two_factors, solve_and_peel, triangularize, Peeled, Triangularized,
};
pub use matching::{assignment, factor_match_error, matching_cost, scaled_error, MatchResult};
pub use mlsvd::{mlsvd_compress, MlsvdResult};
pub use noise::{add_noise_snr, add_noise_with, realized_snr_db, trial_rng, NoiseSpec};
pub use pencil::{select_pencil, PencilChoice, PencilStrategy};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::tensor::{AnyTensor, CpdModel, DenseTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Cpdqz,
    Cpdqzs,
    Gevd,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cpdqz, Method::Cpdqzs, Method::Gevd];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cpdqz => "cpdqz",
            Method::Cpdqzs => "cpdqzs",
            Method::Gevd => "gevd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cpdqz" => Ok(Method::Cpdqz),
            "cpdqzs" => Ok(Method::Cpdqzs),
            "gevd" => Ok(Method::Gevd),
            other => Err(format!("unknown method `{other}` (expected cpdqz, cpdqzs or gevd)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CpdOptions {
    pub pencil: PencilStrategy,
    /// CPDQZS pivot mode (zero-based, at least 2); `None` picks the last mode.
    pub pivot_mode: Option<usize>,
    /// Rerun a real tensor in complex arithmetic when its pencil has complex
    /// eigenvalues, instead of failing.
    pub complex_fallback: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub pencil: PencilStrategy,
    pub core_shape: Vec<usize>,
    pub qz_sweeps: usize,
    /// One relative rank-1 residual per component (the worst over its peeling steps).
    pub rank1_residuals: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport<T: Scalar> {
    pub method: Method,
    pub model: CpdModel<T>,
    pub diagnostics: Diagnostics,
}

/// Rank-`rank` CPD of `m` with the chosen method.
pub fn decompose<T: Scalar>(
    m: &DenseTensor<T>,
    rank: usize,
    method: Method,
    opts: &CpdOptions,
) -> Result<DecompositionReport<T>> {
    match method {
        Method::Cpdqz => cpdqz(m, rank, opts),
        Method::Cpdqzs => cpdqzs(m, rank, opts),
        Method::Gevd => gevd(m, rank, opts),
    }
}

/// A model in whichever field the decomposition ended up using.
#[derive(Clone, Debug)]
pub enum AnyModel {
    Real(CpdModel<f64>),
    Complex(CpdModel<Complex64>),
}

impl AnyModel {
    pub fn field(&self) -> Field {
        match self {
            AnyModel::Real(_) => Field::Real,
            AnyModel::Complex(_) => Field::Complex,
        }
    }

    pub fn to_complex(&self) -> CpdModel<Complex64> {
        match self {
            AnyModel::Real(m) => m.to_complex(),
            AnyModel::Complex(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnyReport {
    pub method: Method,
    pub model: AnyModel,
    pub diagnostics: Diagnostics,
}

impl From<DecompositionReport<f64>> for AnyReport {
    fn from(r: DecompositionReport<f64>) -> Self {
        AnyReport {
            method: r.method,
            model: AnyModel::Real(r.model),
            diagnostics: r.diagnostics,
        }
    }
}

impl From<DecompositionReport<Complex64>> for AnyReport {
    fn from(r: DecompositionReport<Complex64>) -> Self {
        AnyReport {
            method: r.method,
            model: AnyModel::Complex(r.model),
            diagnostics: r.diagnostics,
        }
    }
}

/// Runtime-field entry point. A real tensor whose pencil turns out to have
/// complex eigenvalues is retried in complex arithmetic when
/// `opts.complex_fallback` is set; the report then carries a warning.
pub fn decompose_any(t: &AnyTensor, rank: usize, method: Method, opts: &CpdOptions) -> Result<AnyReport> {
    match t {
        AnyTensor::Complex(c) => decompose(c, rank, method, opts).map(Into::into),
        AnyTensor::Real(r) => match decompose(r, rank, method, opts) {
            Ok(rep) => Ok(rep.into()),
            Err(Error::RealPencilComplexEigenvalues { index }) if opts.complex_fallback => {
                let mut rep = decompose(&r.to_complex(), rank, method, opts)?;
                rep.diagnostics.warnings.push(format!(
                    "real pencil has complex eigenvalues (block at {index}); \
                     decomposed in complex arithmetic, factors may carry complex phases"
                ));
                Ok(rep.into())
            }
            Err(e) => Err(e),
        },
    }
}
