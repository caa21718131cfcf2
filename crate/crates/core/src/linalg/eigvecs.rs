use super::{fro, qz_decompose};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Mat;

#[derive(Clone, Debug, PartialEq)]
pub enum EigvecWarning {
    /// Eigenvalue `index` (nearly) coincides with an earlier one; its
    /// eigenvector was computed with a perturbed pivot.
    IllConditionedEigenvectors { index: usize },
}

impl std::fmt::Display for EigvecWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EigvecWarning::IllConditionedEigenvectors { index } => {
                write!(f, "ill-conditioned generalized eigenvector {index} (repeated eigenvalue)")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneralizedEigvecs<T: Scalar> {
    /// Unit-norm columns `v_r` with `(beta_r·M1 − alpha_r·M2)·v_r ≈ 0`.
    pub vectors: Mat<T>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub warnings: Vec<EigvecWarning>,
    /// QZ sweeps spent on the underlying Schur form.
    pub sweeps: usize,
}

/// Right generalized eigenvectors from the QZ form followed by triangular
/// back-substitution.
pub fn generalized_eigvecs<T: Scalar>(m1: &Mat<T>, m2: &Mat<T>) -> Result<GeneralizedEigvecs<T>> {
    let qz = qz_decompose(m1, m2)?;
    let n = qz.s.nrows();
    let (s, t) = (&qz.s, &qz.t);
    let (snorm, tnorm) = (fro(s), fro(t));
    let alpha = qz.alpha();
    let beta = qz.beta();
    let tol = 10.0 * n as f64 * f64::EPSILON;

    for r in 0..n {
        if alpha[r].modulus() <= tol * snorm && beta[r].modulus() <= tol * tnorm {
            return Err(Error::SingularPencil { index: r });
        }
    }

    let mut warnings = Vec::new();
    let mut y = Mat::<T>::zeros(n, n);
    for r in 0..n {
        let (a, b) = (alpha[r], beta[r]);
        let small = f64::EPSILON * (b.modulus() * snorm + a.modulus() * tnorm);
        y[(r, r)] = T::one();
        let mut flagged = false;
        for i in (0..r).rev() {
            let mut rhs = T::zero();
            for j in i + 1..=r {
                rhs -= (b * s[(i, j)] - a * t[(i, j)]) * y[(j, r)];
            }
            let mut d = b * s[(i, i)] - a * t[(i, i)];
            if d.modulus() <= small {
                d = T::from_real(small.max(f64::MIN_POSITIVE));
                flagged = true;
            }
            y[(i, r)] = rhs / d;
        }
        if flagged {
            warnings.push(EigvecWarning::IllConditionedEigenvectors { index: r });
        }
    }

    let mut vectors = &qz.z * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        col.unscale_mut(nrm);
    }
    Ok(GeneralizedEigvecs {
        vectors,
        alpha,
        beta,
        warnings,
        sweeps: qz.sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil_gives_unit_vectors() {
        let m1 = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0]));
        let m2 = Mat::<f64>::identity(2, 2);
        let e = generalized_eigvecs(&m1, &m2).unwrap();
        for (r, col) in e.vectors.column_iter().enumerate() {
            let lam = e.alpha[r] / e.beta[r];
            let idx = if (lam - 3.0).abs() < 1e-12 { 0 } else { 1 };
            assert!((col[idx].abs() - 1.0).abs() < 1e-14);
            assert!(col[1 - idx].abs() < 1e-14);
        }
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn singular_pencil_is_rejected() {
        let m = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            generalized_eigvecs(&m, &m),
            Err(Error::SingularPencil { .. })
        ));
    }

    #[test]
    fn repeated_eigenvalue_warns() {
        let m1 = Mat::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        let m2 = Mat::<f64>::identity(2, 2);
        let e = generalized_eigvecs(&m1, &m2).unwrap();
        assert!(!e.warnings.is_empty());
    }
}
