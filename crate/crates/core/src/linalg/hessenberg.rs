use super::givens::{Pencil, Rotation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Mat;

/// `h = q0·M1·z0` upper Hessenberg and `t = q0·M2·z0` upper triangular.
#[derive(Clone, Debug)]
pub struct HessenbergTriangular<T: Scalar> {
    pub q0: Mat<T>,
    pub z0: Mat<T>,
    pub h: Mat<T>,
    pub t: Mat<T>,
}

pub(crate) fn check_pencil<T: Scalar>(m1: &Mat<T>, m2: &Mat<T>) -> Result<usize> {
    let n = m1.nrows();
    if n == 0 || m1.ncols() != n || m2.shape() != (n, n) {
        return Err(Error::dims(format!(
            "pencil needs two square matrices of equal size, got {:?} and {:?}",
            m1.shape(),
            m2.shape()
        )));
    }
    Ok(n)
}

/// Givens-based reduction: first triangularize `b`, then chase `a` to
/// Hessenberg form column by column while restoring `b` after every step.
pub(crate) fn reduce<T: Scalar>(p: &mut Pencil<T>) {
    let n = p.n();
    for k in 0..n.saturating_sub(1) {
        for i in (k + 1..n).rev() {
            let g = Rotation::zeroing(p.b[(i - 1, k)], p.b[(i, k)]);
            p.rotate_rows(&g, i - 1, i);
            p.b[(i, k)] = T::zero();
        }
    }
    for k in 0..n.saturating_sub(2) {
        for i in (k + 2..n).rev() {
            let g = Rotation::zeroing(p.a[(i - 1, k)], p.a[(i, k)]);
            p.rotate_rows(&g, i - 1, i);
            p.a[(i, k)] = T::zero();
            let w = Rotation::killing_first(p.b[(i, i - 1)], p.b[(i, i)]);
            p.rotate_cols(&w, i - 1, i);
            p.b[(i, i - 1)] = T::zero();
        }
    }
}

pub fn hessenberg_triangular<T: Scalar>(
    m1: &Mat<T>,
    m2: &Mat<T>,
) -> Result<HessenbergTriangular<T>> {
    check_pencil(m1, m2)?;
    let mut p = Pencil::new(m1, m2);
    reduce(&mut p);
    Ok(HessenbergTriangular {
        q0: p.q,
        z0: p.z,
        h: p.a,
        t: p.b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fro, max_below_subdiagonal, max_strict_lower, unitarity_defect};
    use num_complex::Complex64;

    fn pseudo(n: usize, seed: u64) -> Mat<f64> {
        // small deterministic generator, test-only
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        Mat::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn random_pair_reduces() {
        let (m1, m2) = (pseudo(5, 1), pseudo(5, 2));
        let ht = hessenberg_triangular(&m1, &m2).unwrap();
        assert!(max_below_subdiagonal(&ht.h) <= 1e-13 * fro(&m1));
        assert!(max_strict_lower(&ht.t) <= 1e-13 * fro(&m2));
        assert!(unitarity_defect(&ht.q0) < 1e-12);
        assert!(unitarity_defect(&ht.z0) < 1e-12);
        let back = ht.q0.adjoint() * &ht.h * ht.z0.adjoint();
        assert!(fro(&(back - &m1)) <= 1e-12 * fro(&m1));
        let back = ht.q0.adjoint() * &ht.t * ht.z0.adjoint();
        assert!(fro(&(back - &m2)) <= 1e-12 * fro(&m2));
    }

    #[test]
    fn complex_pair_reduces() {
        let m1 = pseudo(6, 3).zip_map(&pseudo(6, 4), Complex64::new);
        let m2 = pseudo(6, 5).zip_map(&pseudo(6, 6), Complex64::new);
        let ht = hessenberg_triangular(&m1, &m2).unwrap();
        assert!(max_below_subdiagonal(&ht.h) <= 1e-13 * fro(&m1));
        assert!(max_strict_lower(&ht.t) <= 1e-13 * fro(&m2));
        let back = ht.q0.adjoint() * &ht.h * ht.z0.adjoint();
        assert!(fro(&(back - &m1)) <= 1e-12 * fro(&m1));
    }

    #[test]
    fn already_reduced_input_is_kept() {
        let mut h = pseudo(4, 7);
        let mut t = pseudo(4, 8);
        for j in 0..4 {
            for i in 0..4 {
                if i > j + 1 {
                    h[(i, j)] = 0.0;
                }
                if i > j {
                    t[(i, j)] = 0.0;
                }
            }
        }
        let ht = hessenberg_triangular(&h, &t).unwrap();
        assert_eq!(ht.h, h);
        assert_eq!(ht.t, t);
        assert_eq!(ht.q0, Mat::identity(4, 4));
        assert_eq!(ht.z0, Mat::identity(4, 4));
    }

    #[test]
    fn rejects_mismatched_sizes() {
        assert!(hessenberg_triangular(&pseudo(3, 1), &pseudo(4, 1)).is_err());
        assert!(hessenberg_triangular(&Mat::<f64>::zeros(2, 3), &Mat::zeros(2, 3)).is_err());
    }
}
