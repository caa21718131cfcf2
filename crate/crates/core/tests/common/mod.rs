#![allow(dead_code)]

use qzcpd::{Complex64, CpdModel, DenseTensor, Mat, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<T: Scalar>(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Mat<T> {
    Mat::from_fn(m, n, |_, _| T::standard_normal(rng))
}

/// Unitary matrix from the QR factorization of a Gaussian matrix.
pub fn unitary<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Mat<T> {
    gaussian::<T>(rng, n, n).qr().q()
}

pub fn upper_triangular<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Mat<T> {
    let mut m = gaussian::<T>(rng, n, n);
    for j in 0..n {
        for i in j + 1..n {
            m[(i, j)] = T::zero();
        }
    }
    m
}

/// Factors with i.i.d. uniform[0, 1] entries and unit-norm columns.
pub fn uniform_factors(rng: &mut ChaCha8Rng, shape: &[usize], rank: usize) -> CpdModel<f64> {
    let factors = shape
        .iter()
        .map(|&e| {
            let mut f = Mat::from_fn(e, rank, |_, _| rng.random::<f64>());
            for mut c in f.column_iter_mut() {
                let n = c.norm();
                c.unscale_mut(n);
            }
            f
        })
        .collect();
    CpdModel::new(factors).unwrap()
}

pub fn gaussian_factors<T: Scalar>(rng: &mut ChaCha8Rng, shape: &[usize], rank: usize) -> CpdModel<T> {
    CpdModel::new(shape.iter().map(|&e| gaussian::<T>(rng, e, rank)).collect()).unwrap()
}

/// Sum of outer products evaluated entry by entry.
pub fn brute_force_full<T: Scalar>(model: &CpdModel<T>) -> DenseTensor<T> {
    let shape = model.shape();
    DenseTensor::from_fn(shape, |idx| {
        let mut acc = T::zero();
        for r in 0..model.rank() {
            let mut term = T::one();
            for (n, &i) in idx.iter().enumerate() {
                term *= model.factor(n)[(i, r)];
            }
            acc += term;
        }
        acc
    })
    .unwrap()
}

pub fn rel_diff<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(&x, &y)| (x - y).modulus_squared()).sum();
    let den: f64 = b.iter().map(|x| x.modulus_squared()).sum();
    (num / den).sqrt()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
