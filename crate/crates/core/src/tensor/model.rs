use num_complex::Complex64;

use super::DenseTensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Mat;

/// Column-wise Kronecker product: column `r` is `a(:, r) ⊗ b(:, r)`, so the
/// row index of `b` varies fastest.
pub fn khatri_rao<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    if a.ncols() != b.ncols() {
        return Err(Error::dims(format!(
            "Khatri-Rao operands have {} and {} columns",
            a.ncols(),
            b.ncols()
        )));
    }
    let (ra, rb) = (a.nrows(), b.nrows());
    let mut out = Mat::zeros(ra * rb, a.ncols());
    for r in 0..a.ncols() {
        for i in 0..ra {
            let ai = a[(i, r)];
            for j in 0..rb {
                out[(i * rb + j, r)] = ai * b[(j, r)];
            }
        }
    }
    Ok(out)
}

/// `mats[0] ⊙ mats[1] ⊙ … ⊙ mats[k-1]`; the last matrix's rows vary fastest.
pub fn khatri_rao_chain<T: Scalar>(mats: &[&Mat<T>]) -> Result<Mat<T>> {
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::dims("Khatri-Rao chain of zero matrices"))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, m| khatri_rao(&acc, m))
}

/// Rank-R canonical polyadic model: N factor matrices sharing R columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CpdModel<T: Scalar> {
    factors: Vec<Mat<T>>,
}

impl<T: Scalar> CpdModel<T> {
    /// Validates equal column counts and rejects exactly-zero columns.
    pub fn new(factors: Vec<Mat<T>>) -> Result<Self> {
        let rank = factors
            .first()
            .ok_or_else(|| Error::InvalidShape("a CPD needs at least one factor".into()))?
            .ncols();
        if rank == 0 {
            return Err(Error::InvalidShape("a CPD needs rank at least 1".into()));
        }
        for (n, f) in factors.iter().enumerate() {
            if f.ncols() != rank {
                return Err(Error::dims(format!(
                    "factor {n} has {} columns, expected {rank}",
                    f.ncols()
                )));
            }
            if f.nrows() == 0 {
                return Err(Error::InvalidShape(format!("factor {n} has no rows")));
            }
            for (r, col) in f.column_iter().enumerate() {
                if col.iter().all(|x| *x == T::zero()) {
                    return Err(Error::ZeroColumn {
                        factor: n,
                        column: r,
                    });
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn rank(&self) -> usize {
        self.factors[0].ncols()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Mat<T>] {
        &self.factors
    }

    pub fn factor(&self, n: usize) -> &Mat<T> {
        &self.factors[n]
    }

    pub fn into_factors(self) -> Vec<Mat<T>> {
        self.factors
    }

    /// Tensor extents implied by the factor row counts.
    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.nrows()).collect()
    }

    pub fn to_complex(&self) -> CpdModel<Complex64> {
        CpdModel {
            factors: self.factors.iter().map(|f| f.map(|x| x.to_c64())).collect(),
        }
    }

    /// Sum of rank-one terms, checked against the requested extents.
    pub fn reconstruct(&self, shape: &[usize]) -> Result<DenseTensor<T>> {
        if shape != self.shape().as_slice() {
            return Err(Error::dims(format!(
                "model extents {:?} do not match requested shape {shape:?}",
                self.shape()
            )));
        }
        self.full()
    }

    /// Reconstruction as `U1 · (U_N ⊙ … ⊙ U_2)ᵀ` laid out column-major.
    pub fn full(&self) -> Result<DenseTensor<T>> {
        let shape = self.shape();
        let rest = if self.order() == 1 {
            Mat::from_element(1, self.rank(), T::one())
        } else {
            let tail: Vec<&Mat<T>> = self.factors[1..].iter().rev().collect();
            khatri_rao_chain(&tail)?
        };
        let unfolded = &self.factors[0] * rest.transpose();
        DenseTensor::new(shape, unfolded.as_slice().to_vec())
    }

    /// Unit-norm columns, with the product of column norms returned as weights.
    pub fn normalized(&self) -> (Self, Vec<f64>) {
        let mut weights = vec![1.0; self.rank()];
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let mut g = f.clone();
                for (r, mut col) in g.column_iter_mut().enumerate() {
                    let nrm = col.norm();
                    weights[r] *= nrm;
                    if nrm > 0.0 {
                        col.unscale_mut(nrm);
                    }
                }
                g
            })
            .collect();
        (Self { factors }, weights)
    }
}
