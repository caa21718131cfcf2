use std::fmt::{self, Debug};

use nalgebra::ComplexField;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::qz::{self, QzResult};
use crate::Mat;

/// Scalar field tag shared by every entry of a tensor or matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(format!("unknown field tag `{other}`")),
        }
    }
}

/// Entry type of tensors and matrices: `f64` or `Complex64`.
///
/// The QZ decomposition is dispatched through this trait because the two
/// fields use different iterations (double-shift real QZ versus single-shift
/// complex QZ).
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + Debug + 'static {
    const FIELD: Field;

    fn to_c64(self) -> Complex64;

    /// Converts back from a complex value; the imaginary part is dropped for
    /// the real field.
    fn from_c64(z: Complex64) -> Self;

    /// One standard Gaussian draw. Complex draws use independent N(0, 1)
    /// real and imaginary parts.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn qz(m1: &Mat<Self>, m2: &Mat<Self>) -> Result<QzResult<Self>>;
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn from_c64(z: Complex64) -> Self {
        z.re
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn qz(m1: &Mat<Self>, m2: &Mat<Self>) -> Result<QzResult<Self>> {
        qz::real_qz(m1, m2)
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    fn to_c64(self) -> Complex64 {
        self
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    }

    fn qz(m1: &Mat<Self>, m2: &Mat<Self>) -> Result<QzResult<Self>> {
        qz::complex_qz(m1, m2)
    }
}

/// Promotes a matrix to the complex field.
pub fn to_complex<T: Scalar>(m: &Mat<T>) -> Mat<Complex64> {
    m.map(|x| x.to_c64())
}
