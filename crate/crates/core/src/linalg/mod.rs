//! Matrix kernels: Hessenberg-triangular reduction, QZ, generalized
//! eigenvectors, SVD, best rank-1 approximation and least squares.
//!
//! Every kernel is a pure function of its inputs; there is no hidden
//! randomness, so identical inputs give bitwise-identical outputs.

mod eigvecs;
mod givens;
mod hessenberg;
pub mod qz;
mod svd;

pub use eigvecs::{generalized_eigvecs, EigvecWarning, GeneralizedEigvecs};
pub use hessenberg::{hessenberg_triangular, HessenbergTriangular};
pub use qz::{qz_decompose, QzResult};
pub use svd::{best_rank1, lstsq, svd, RankOne, SvdResult, RANK_TOL};

use crate::scalar::Scalar;
use crate::Mat;

/// Frobenius norm.
pub fn fro<T: Scalar>(m: &Mat<T>) -> f64 {
    m.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

/// Largest modulus strictly below the diagonal.
pub fn max_strict_lower<T: Scalar>(m: &Mat<T>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in j + 1..m.nrows() {
            worst = worst.max(m[(i, j)].modulus());
        }
    }
    worst
}

/// Largest modulus below the first subdiagonal.
pub fn max_below_subdiagonal<T: Scalar>(m: &Mat<T>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in j + 2..m.nrows() {
            worst = worst.max(m[(i, j)].modulus());
        }
    }
    worst
}

/// `‖MᴴM − I‖_F`.
pub fn unitarity_defect<T: Scalar>(m: &Mat<T>) -> f64 {
    let g = m.adjoint() * m;
    fro(&(g - Mat::identity(m.ncols(), m.ncols())))
}
