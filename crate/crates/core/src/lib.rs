//! Algebraic canonical polyadic decomposition (CPD) of dense tensors.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`] holds the dense N-way array, its unfoldings, mode products,
//!   Khatri-Rao products and CPD reconstruction.
//! * [`linalg`] provides the matrix kernels: Hessenberg-triangular reduction,
//!   the QZ (generalized Schur) decomposition for real and complex pencils,
//!   generalized eigenvectors, SVD, best rank-1 approximation and least squares.
//! * [`cpd`] implements the decompositions themselves (`cpdqz`, `cpdqzs`, and
//!   the `gevd` baseline) together with MLSVD compression, pencil selection,
//!   factor matching and SNR-calibrated noise.
//!
//! Modes and indices are zero-based throughout the Rust API.

pub mod cpd;
pub mod error;
pub mod linalg;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::{Field, Scalar};
pub use tensor::{AnyTensor, CpdModel, DenseTensor};

/// Dense column-major matrix used by every kernel.
pub type Mat<T> = nalgebra::DMatrix<T>;

pub use num_complex::Complex64;
