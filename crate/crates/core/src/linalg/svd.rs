use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Mat;

/// Relative threshold below which [`lstsq`] treats a matrix as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Thin SVD `A = U·diag(sigma)·Vᴴ` with `sigma` non-increasing.
#[derive(Clone, Debug)]
pub struct SvdResult<T: Scalar> {
    pub u: Mat<T>,
    pub sigma: Vec<f64>,
    pub v: Mat<T>,
}

/// Dominant singular triplet: `A ≈ sigma·u·vᴴ`.
#[derive(Clone, Debug)]
pub struct RankOne<T: Scalar> {
    pub u: DVector<T>,
    pub sigma: f64,
    pub v: DVector<T>,
    /// `‖A − sigma·u·vᴴ‖_F / ‖A‖_F`.
    pub relative_residual: f64,
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Columns of the working copy are rotated pairwise until they are mutually
/// orthogonal; their norms are the singular values. This stays accurate for
/// exactly rank-deficient input, where the singular vectors of the null part
/// are completed to an orthonormal set.
pub fn svd<T: Scalar>(a: &Mat<T>) -> Result<SvdResult<T>> {
    let (m, n) = a.shape();
    if m.min(n) == 0 {
        return Err(Error::dims("SVD of an empty matrix"));
    }
    if a.iter().any(|x| !x.modulus().is_finite()) {
        return Err(Error::SvdNoConvergence);
    }
    if m < n {
        let t = svd(&a.adjoint())?;
        return Ok(SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let mut w = a.clone();
    let mut v = Mat::<T>::identity(n, n);
    let tol = f64::EPSILON * (m as f64).sqrt();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.modulus();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence);
    }

    let norms: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let floor = sigma[0] * f64::EPSILON * m.max(n) as f64;
    let mut u = Mat::<T>::zeros(m, n);
    let mut filled = 0;
    for (j, &i) in order.iter().enumerate() {
        if sigma[j] > floor {
            u.set_column(j, &w.column(i).unscale(sigma[j]));
            filled = j + 1;
        }
    }
    complete_basis(&mut u, filled);
    let v = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SvdResult { u, sigma, v })
}

const MAX_SWEEPS: usize = 80;

/// Rephases column `q` by `conj(phase)`, then applies `[p, q]·[[c, s], [−s, c]]`.
fn rotate<T: Scalar>(m: &mut Mat<T>, p: usize, q: usize, phase: T, c: f64, s: f64) {
    let phase_conj = phase.conjugate();
    for i in 0..m.nrows() {
        let x = m[(i, p)];
        let y = m[(i, q)] * phase_conj;
        m[(i, p)] = x.scale(c) - y.scale(s);
        m[(i, q)] = x.scale(s) + y.scale(c);
    }
}

/// Fills columns `filled..` of `u` with unit vectors orthogonal to the
/// earlier columns (modified Gram-Schmidt on the standard basis).
fn complete_basis<T: Scalar>(u: &mut Mat<T>, filled: usize) {
    let (m, n) = u.shape();
    let mut next = filled;
    let mut k = 0;
    while next < n && k < m {
        let mut e = nalgebra::DVector::<T>::zeros(m);
        e[k] = T::one();
        for _ in 0..2 {
            for j in 0..next {
                let proj = u.column(j).dotc(&e);
                e -= u.column(j) * proj;
            }
        }
        let nrm = e.norm();
        if nrm > 0.5 {
            u.set_column(next, &e.unscale(nrm));
            next += 1;
        }
        k += 1;
    }
}

pub fn best_rank1<T: Scalar>(a: &Mat<T>) -> Result<RankOne<T>> {
    let total: f64 = a.iter().map(|x| x.modulus_squared()).sum();
    if total == 0.0 {
        return Err(Error::ZeroInput);
    }
    let dec = svd(a)?;
    let tail: f64 = dec.sigma[1..].iter().map(|s| s * s).sum();
    Ok(RankOne {
        u: dec.u.column(0).into_owned(),
        sigma: dec.sigma[0],
        v: dec.v.column(0).into_owned(),
        relative_residual: (tail / total).sqrt(),
    })
}

/// Least-squares solution of `A·X = B` through the SVD of `A`.
pub fn lstsq<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::dims(format!(
            "least squares needs rows >= cols, got {m}x{n}"
        )));
    }
    if b.nrows() != m {
        return Err(Error::dims(format!(
            "right-hand side has {} rows, expected {m}",
            b.nrows()
        )));
    }
    let dec = svd(a)?;
    let smax = dec.sigma[0];
    let smin = dec.sigma[n - 1];
    if smax == 0.0 || smin <= RANK_TOL * smax {
        return Err(Error::RankDeficient {
            sigma_min: smin,
            sigma_max: smax,
        });
    }
    let mut coeffs = dec.u.adjoint() * b;
    for (i, mut row) in coeffs.row_iter_mut().enumerate() {
        row.unscale_mut(dec.sigma[i]);
    }
    Ok(dec.v * coeffs)
}
