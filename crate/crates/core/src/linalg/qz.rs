//! Generalized Schur (QZ) decomposition of a square pencil `(M1, M2)`.
//!
//! Both fields start from the Hessenberg-triangular reduction. The complex
//! path runs single-shift QZ sweeps; the real path runs Francis double-shift
//! sweeps and then splits every converged 2x2 diagonal block with real
//! eigenvalues. A 2x2 block carrying a complex conjugate pair is reported as
//! [`Error::RealPencilComplexEigenvalues`] instead of being kept in
//! quasi-triangular form.

use num_complex::Complex64;

use super::givens::{Pencil, Rotation};
use super::hessenberg::{check_pencil, reduce};
use super::fro;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Mat;

const EPS: f64 = f64::EPSILON;
const SWEEPS_PER_ROW: usize = 30;
const EXCEPTIONAL_EVERY: usize = 10;

/// Output of [`qz_decompose`]: `s = q·M1·z` and `t = q·M2·z` upper triangular.
#[derive(Clone, Debug)]
pub struct QzResult<T: Scalar> {
    pub q: Mat<T>,
    pub z: Mat<T>,
    pub s: Mat<T>,
    pub t: Mat<T>,
    /// Number of QZ sweeps performed.
    pub sweeps: usize,
}

impl<T: Scalar> QzResult<T> {
    pub fn alpha(&self) -> Vec<T> {
        self.s.diagonal().iter().copied().collect()
    }

    pub fn beta(&self) -> Vec<T> {
        self.t.diagonal().iter().copied().collect()
    }

    /// `(alpha_r, beta_r) = (s[r, r], t[r, r])` in deflation order.
    pub fn eigen_ratios(&self) -> Vec<(T, T)> {
        self.alpha().into_iter().zip(self.beta()).collect()
    }

    /// `alpha_r / beta_r`; infinite when `beta_r` vanishes.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigen_ratios()
            .into_iter()
            .map(|(a, b)| {
                let (a, b) = (a.to_c64(), b.to_c64());
                if b == Complex64::new(0.0, 0.0) {
                    Complex64::new(f64::INFINITY, 0.0)
                } else {
                    a / b
                }
            })
            .collect()
    }
}

pub fn qz_decompose<T: Scalar>(m1: &Mat<T>, m2: &Mat<T>) -> Result<QzResult<T>> {
    T::qz(m1, m2)
}

fn negligible_subdiag<T: Scalar>(a: &Mat<T>, k: usize, anorm: f64) -> bool {
    let mut scale = a[(k - 1, k - 1)].modulus() + a[(k, k)].modulus();
    if scale == 0.0 {
        scale = anorm;
    }
    a[(k, k - 1)].modulus() <= EPS * scale
}

enum Window {
    /// `a[hi, hi-1]` is zero: a 1x1 block deflates.
    Single,
    /// Unreduced block `lo..=hi`.
    Active(usize),
}

/// Clears negligible subdiagonal entries and zero diagonal entries of `b`
/// inside `0..=hi`, then reports the active window ending at `hi`.
fn locate<T: Scalar>(p: &mut Pencil<T>, hi: usize, anorm: f64, bnorm: f64) -> Window {
    loop {
        if hi == 0 {
            return Window::Single;
        }
        let mut lo = 0;
        for k in (1..=hi).rev() {
            if negligible_subdiag(&p.a, k, anorm) {
                p.a[(k, k - 1)] = T::zero();
                lo = k;
                break;
            }
        }
        if lo == hi {
            return Window::Single;
        }
        let zero_beta = (lo..=hi).find(|&j| p.b[(j, j)].modulus() <= EPS * bnorm);
        match zero_beta {
            Some(j) => p.chase_zero_beta(lo, hi, j),
            None => return Window::Active(lo),
        }
    }
}

/// Roots of `det(A2 − λ·B2) = 0` for the 2x2 block at `k` (with `b[k+1, k] = 0`).
fn block_quadratic(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> (Complex64, Complex64, Complex64) {
    let qa = b[0][0] * b[1][1];
    let qb = -(a[0][0] * b[1][1] + a[1][1] * b[0][0] - a[1][0] * b[0][1]);
    let qc = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    (qa, qb, qc)
}

fn block_at<T: Scalar>(m: &Mat<T>, k: usize) -> [[Complex64; 2]; 2] {
    [
        [m[(k, k)].to_c64(), m[(k, k + 1)].to_c64()],
        [m[(k + 1, k)].to_c64(), m[(k + 1, k + 1)].to_c64()],
    ]
}

fn finish<T: Scalar>(p: Pencil<T>, sweeps: usize) -> QzResult<T> {
    QzResult {
        q: p.q,
        z: p.z,
        s: p.a,
        t: p.b,
        sweeps,
    }
}

// ---------------------------------------------------------------------------
// complex field

pub(crate) fn complex_qz(m1: &Mat<Complex64>, m2: &Mat<Complex64>) -> Result<QzResult<Complex64>> {
    let n = check_pencil(m1, m2)?;
    let mut p = Pencil::new(m1, m2);
    reduce(&mut p);
    let (anorm, bnorm) = (fro(&p.a), fro(&p.b));
    let max_sweeps = SWEEPS_PER_ROW * n;
    let mut sweeps = 0;
    let mut stalled = 0;
    let mut hi = n - 1;

    loop {
        match locate(&mut p, hi, anorm, bnorm) {
            Window::Single => {
                if hi == 0 {
                    break;
                }
                hi -= 1;
                stalled = 0;
            }
            Window::Active(lo) => {
                if sweeps >= max_sweeps {
                    return Err(Error::QzNoConvergence { iterations: sweeps });
                }
                sweeps += 1;
                stalled += 1;
                let shift = if stalled % EXCEPTIONAL_EVERY == 0 {
                    exceptional_shift(&p, hi)
                } else {
                    wilkinson_shift(&p, hi)
                };
                single_shift_sweep(&mut p, lo, hi, shift);
            }
        }
    }
    Ok(finish(p, sweeps))
}

/// Eigenvalue of the trailing 2x2 block closest to the trailing 1x1 ratio.
fn wilkinson_shift<T: Scalar>(p: &Pencil<T>, hi: usize) -> Complex64 {
    let k = hi - 1;
    let (qa, qb, qc) = block_quadratic(block_at(&p.a, k), block_at(&p.b, k));
    let corner = p.a[(hi, hi)].to_c64() / p.b[(hi, hi)].to_c64();
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    let q = if (qb.conj() * disc).re >= 0.0 { -(qb + disc) * 0.5 } else { -(qb - disc) * 0.5 };
    let candidates = [q / qa, qc / q];
    let pick = candidates
        .iter()
        .copied()
        .filter(|z| z.is_finite())
        .min_by(|x, y| (x - corner).norm().total_cmp(&(y - corner).norm()));
    pick.unwrap_or(corner)
}

fn exceptional_shift<T: Scalar>(p: &Pencil<T>, hi: usize) -> Complex64 {
    let corner = p.a[(hi, hi)].to_c64() / p.b[(hi, hi)].to_c64();
    corner + p.a[(hi, hi - 1)].modulus() / p.b[(hi - 1, hi - 1)].modulus()
}

fn single_shift_sweep(p: &mut Pencil<Complex64>, lo: usize, hi: usize, shift: Complex64) {
    let x = p.a[(lo, lo)] - shift * p.b[(lo, lo)];
    let y = p.a[(lo + 1, lo)];
    let g = Rotation::zeroing(x, y);
    p.rotate_rows(&g, lo, lo + 1);
    for k in lo..hi {
        let w = Rotation::killing_first(p.b[(k + 1, k)], p.b[(k + 1, k + 1)]);
        p.rotate_cols(&w, k, k + 1);
        p.b[(k + 1, k)] = Complex64::new(0.0, 0.0);
        if k + 2 <= hi {
            let g = Rotation::zeroing(p.a[(k + 1, k)], p.a[(k + 2, k)]);
            p.rotate_rows(&g, k + 1, k + 2);
            p.a[(k + 2, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

// ---------------------------------------------------------------------------
// real field

pub(crate) fn real_qz(m1: &Mat<f64>, m2: &Mat<f64>) -> Result<QzResult<f64>> {
    let n = check_pencil(m1, m2)?;
    let mut p = Pencil::new(m1, m2);
    reduce(&mut p);
    let (anorm, bnorm) = (fro(&p.a), fro(&p.b));
    let max_sweeps = SWEEPS_PER_ROW * n;
    let mut sweeps = 0;
    let mut stalled = 0;
    let mut hi = n - 1;

    loop {
        match locate(&mut p, hi, anorm, bnorm) {
            Window::Single => {
                if hi == 0 {
                    break;
                }
                hi -= 1;
                stalled = 0;
            }
            Window::Active(lo) if lo + 1 == hi => {
                split_real_block(&mut p, lo)?;
                if hi < 2 {
                    break;
                }
                hi -= 2;
                stalled = 0;
            }
            Window::Active(lo) => {
                if sweeps >= max_sweeps {
                    return Err(Error::QzNoConvergence { iterations: sweeps });
                }
                sweeps += 1;
                stalled += 1;
                double_shift_sweep(&mut p, lo, hi, stalled % EXCEPTIONAL_EVERY == 0);
            }
        }
    }
    Ok(finish(p, sweeps))
}

/// Triangularizes the isolated 2x2 block at `k` when its eigenvalues are real.
fn split_real_block(p: &mut Pencil<f64>, k: usize) -> Result<()> {
    let (a, b) = (block_at(&p.a, k), block_at(&p.b, k));
    let (qa, qb, qc) = block_quadratic(a, b);
    let (qa, qb, qc) = (qa.re, qb.re, qc.re);
    let mut disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        if -disc <= 8.0 * EPS * (qb * qb + 4.0 * (qa * qc).abs()) {
            disc = 0.0;
        } else {
            return Err(Error::RealPencilComplexEigenvalues { index: k });
        }
    }
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let lambda = if q != 0.0 { q / qa } else { 0.0 };

    // Column rotation whose first column spans the null space of A2 − λ·B2.
    let c = [
        [a[0][0].re - lambda * b[0][0].re, a[0][1].re - lambda * b[0][1].re],
        [a[1][0].re - lambda * b[1][0].re, a[1][1].re - lambda * b[1][1].re],
    ];
    let row = if c[0][0].hypot(c[0][1]) >= c[1][0].hypot(c[1][1]) { c[0] } else { c[1] };
    let nrm = row[0].hypot(row[1]);
    let w = if nrm == 0.0 {
        Rotation::identity()
    } else {
        let (n1, n2) = (row[1] / nrm, -row[0] / nrm);
        Rotation { c: n1, s: -n2 }
    };
    p.rotate_cols(&w, k, k + 1);
    let g = Rotation::zeroing(p.b[(k, k)], p.b[(k + 1, k)]);
    p.rotate_rows(&g, k, k + 1);
    p.b[(k + 1, k)] = 0.0;
    p.a[(k + 1, k)] = 0.0;
    Ok(())
}

/// Entries of `M = A·B⁻¹` restricted to the window that the Francis shift needs.
fn shift_vector(p: &Pencil<f64>, lo: usize, hi: usize, exceptional: bool) -> [f64; 3] {
    let m = hi - lo + 1;
    // inverse of the window's upper-triangular B by back substitution
    let mut binv = vec![0.0; m * m];
    for j in 0..m {
        binv[j + m * j] = 1.0 / p.b[(lo + j, lo + j)];
        for i in (0..j).rev() {
            let mut acc = 0.0;
            for k in i + 1..=j {
                acc += p.b[(lo + i, lo + k)] * binv[k + m * j];
            }
            binv[i + m * j] = -acc / p.b[(lo + i, lo + i)];
        }
    }
    let mm = |i: usize, j: usize| -> f64 {
        // A is Hessenberg, B⁻¹ upper triangular: only k in (i-1)..=j contributes.
        let (il, jl) = (i - lo, j - lo);
        let start = il.saturating_sub(1);
        (start..=jl).map(|k| p.a[(i, lo + k)] * binv[k + m * jl]).sum()
    };

    let (trace, det) = if exceptional {
        let s = mm(hi, hi - 1).abs() + mm(hi - 1, hi - 2).abs();
        let h11 = 0.75 * s + mm(hi, hi);
        (2.0 * h11, h11 * h11 + 0.4375 * s * s)
    } else {
        let (h11, h12, h21, h22) = (mm(hi - 1, hi - 1), mm(hi - 1, hi), mm(hi, hi - 1), mm(hi, hi));
        (h11 + h22, h11 * h22 - h12 * h21)
    };
    let (m11, m12, m21, m22, m32) = (
        mm(lo, lo),
        mm(lo, lo + 1),
        mm(lo + 1, lo),
        mm(lo + 1, lo + 1),
        mm(lo + 2, lo + 1),
    );
    [
        m11 * m11 + m12 * m21 - trace * m11 + det,
        m21 * (m11 + m22 - trace),
        m21 * m32,
    ]
}

/// Householder vector `u` with `(I − 2uuᵀ/uᵀu)·x = ±‖x‖·e_target`.
fn householder(x: [f64; 3], target: usize) -> Option<([f64; 3], f64)> {
    let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if norm == 0.0 {
        return None;
    }
    let beta = if x[target] >= 0.0 { -norm } else { norm };
    let mut u = x;
    u[target] -= beta;
    let uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    if uu == 0.0 {
        return None;
    }
    Some((u, 2.0 / uu))
}

fn reflect_rows(m: &mut Mat<f64>, k: usize, u: [f64; 3], tau: f64) {
    for c in 0..m.ncols() {
        let d = tau * (u[0] * m[(k, c)] + u[1] * m[(k + 1, c)] + u[2] * m[(k + 2, c)]);
        for (i, ui) in u.iter().enumerate() {
            m[(k + i, c)] -= d * ui;
        }
    }
}

fn reflect_cols(m: &mut Mat<f64>, k: usize, u: [f64; 3], tau: f64) {
    for r in 0..m.nrows() {
        let d = tau * (u[0] * m[(r, k)] + u[1] * m[(r, k + 1)] + u[2] * m[(r, k + 2)]);
        for (j, uj) in u.iter().enumerate() {
            m[(r, k + j)] -= d * uj;
        }
    }
}

fn double_shift_sweep(p: &mut Pencil<f64>, lo: usize, hi: usize, exceptional: bool) {
    let mut v = shift_vector(p, lo, hi, exceptional);
    for k in lo..=hi - 2 {
        if let Some((u, tau)) = householder(v, 0) {
            reflect_rows(&mut p.a, k, u, tau);
            reflect_rows(&mut p.b, k, u, tau);
            reflect_rows(&mut p.q, k, u, tau);
        }
        if k > lo {
            p.a[(k + 1, k - 1)] = 0.0;
            p.a[(k + 2, k - 1)] = 0.0;
        }
        let row = [p.b[(k + 2, k)], p.b[(k + 2, k + 1)], p.b[(k + 2, k + 2)]];
        if let Some((u, tau)) = householder(row, 2) {
            reflect_cols(&mut p.a, k, u, tau);
            reflect_cols(&mut p.b, k, u, tau);
            reflect_cols(&mut p.z, k, u, tau);
        }
        p.b[(k + 2, k)] = 0.0;
        p.b[(k + 2, k + 1)] = 0.0;
        let w = Rotation::killing_first(p.b[(k + 1, k)], p.b[(k + 1, k + 1)]);
        p.rotate_cols(&w, k, k + 1);
        p.b[(k + 1, k)] = 0.0;
        v = [
            p.a[(k + 1, k)],
            p.a[(k + 2, k)],
            if k + 3 <= hi { p.a[(k + 3, k)] } else { 0.0 },
        ];
    }
    let g = Rotation::zeroing(v[0], v[1]);
    p.rotate_rows(&g, hi - 1, hi);
    p.a[(hi, hi - 2)] = 0.0;
    let w = Rotation::killing_first(p.b[(hi, hi - 1)], p.b[(hi, hi)]);
    p.rotate_cols(&w, hi - 1, hi);
    p.b[(hi, hi - 1)] = 0.0;
}
