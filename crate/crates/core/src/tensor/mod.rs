//! Dense N-way tensors and the multilinear primitives built on them.

mod dense;
pub mod io;
mod model;

pub use dense::DenseTensor;
pub use model::{khatri_rao, khatri_rao_chain, CpdModel};

use num_complex::Complex64;

use crate::scalar::Field;

/// A tensor whose scalar field is only known at run time (e.g. read from a file).
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTensor {
    Real(DenseTensor<f64>),
    Complex(DenseTensor<Complex64>),
}

impl AnyTensor {
    pub fn field(&self) -> Field {
        match self {
            AnyTensor::Real(_) => Field::Real,
            AnyTensor::Complex(_) => Field::Complex,
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            AnyTensor::Real(t) => t.shape(),
            AnyTensor::Complex(t) => t.shape(),
        }
    }

    pub fn order(&self) -> usize {
        self.shape().len()
    }

    pub fn norm(&self) -> f64 {
        match self {
            AnyTensor::Real(t) => t.norm(),
            AnyTensor::Complex(t) => t.norm(),
        }
    }

    /// Explicit promotion to the complex field.
    pub fn to_complex(&self) -> DenseTensor<Complex64> {
        match self {
            AnyTensor::Real(t) => t.to_complex(),
            AnyTensor::Complex(t) => t.clone(),
        }
    }
}

impl From<DenseTensor<f64>> for AnyTensor {
    fn from(t: DenseTensor<f64>) -> Self {
        AnyTensor::Real(t)
    }
}

impl From<DenseTensor<Complex64>> for AnyTensor {
    fn from(t: DenseTensor<Complex64>) -> Self {
        AnyTensor::Complex(t)
    }
}
