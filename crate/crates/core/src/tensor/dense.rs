use nalgebra::{DMatrixView, DMatrixViewMut};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::Mat;

/// Dense N-way array stored column-major (first index fastest).
///
/// Values are immutable once constructed; every operation returns a new tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

fn check_shape(shape: &[usize]) -> Result<usize> {
    if shape.is_empty() {
        return Err(Error::InvalidShape("tensor order must be at least 1".into()));
    }
    if let Some(pos) = shape.iter().position(|&e| e == 0) {
        return Err(Error::InvalidShape(format!("extent of mode {pos} is zero")));
    }
    Ok(shape.iter().product())
}

/// Advances a column-major multi-index. Returns false after the last index.
fn advance(idx: &mut [usize], shape: &[usize]) -> bool {
    for (i, e) in idx.iter_mut().zip(shape) {
        *i += 1;
        if *i < *e {
            return true;
        }
        *i = 0;
    }
    false
}

impl<T: Scalar> DenseTensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let len = check_shape(&shape)?;
        if data.len() != len {
            return Err(Error::InvalidShape(format!(
                "shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let len = check_shape(&shape)?;
        Ok(Self {
            shape,
            data: vec![T::zero(); len],
        })
    }

    /// Builds a tensor by evaluating `f` at every multi-index, in storage order.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let len = check_shape(&shape)?;
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0; shape.len()];
        loop {
            data.push(f(&idx));
            if !advance(&mut idx, &shape) {
                break;
            }
        }
        Ok(Self { shape, data })
    }

    /// Wraps a matrix as an order-2 tensor.
    pub fn from_matrix(m: &Mat<T>) -> Self {
        Self {
            shape: vec![m.nrows(), m.ncols()],
            data: m.as_slice().to_vec(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut off = 0;
        let mut stride = 1;
        for (i, e) in idx.iter().zip(&self.shape) {
            debug_assert!(i < e);
            off += i * stride;
            stride *= e;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[self.offset(idx)]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.modulus_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> DenseTensor<U> {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn to_complex(&self) -> DenseTensor<Complex64> {
        self.map(|x| x.to_c64())
    }

    /// Entrywise sum; shapes must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::dims(format!(
                "cannot add shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Reinterprets the buffer under a new shape with the same number of entries.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self> {
        Self::new(shape, self.data.clone())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::BadMode {
                mode,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// Splits the shape around `mode` into (product before, extent, product after).
    fn split_at_mode(&self, mode: usize) -> (usize, usize, usize) {
        let left = self.shape[..mode].iter().product();
        let right = self.shape[mode + 1..].iter().product();
        (left, self.shape[mode], right)
    }

    /// Mode-`mode` unfolding of an order-3 tensor: rows are indexed by `mode`,
    /// columns by the two remaining modes with the smaller mode fastest.
    pub fn unfold(&self, mode: usize) -> Result<Mat<T>> {
        if self.order() != 3 {
            return Err(Error::OrderMismatch {
                expected: 3,
                found: self.order(),
            });
        }
        self.check_mode(mode)?;
        Ok(self.mode_unfolding(mode))
    }

    /// Mode-`mode` unfolding for any order. Columns enumerate the remaining
    /// modes with the lowest mode fastest, which equals
    /// `general_unfold(&[mode], &[remaining modes, highest first])`.
    ///
    /// Panics if `mode` is out of range.
    pub fn mode_unfolding(&self, mode: usize) -> Mat<T> {
        let (left, extent, right) = self.split_at_mode(mode);
        if left == 1 {
            return Mat::from_column_slice(extent, right, &self.data);
        }
        let mut out = Mat::zeros(extent, left * right);
        for r in 0..right {
            let slab = &self.data[r * left * extent..(r + 1) * left * extent];
            for a in 0..extent {
                for l in 0..left {
                    out[(a, l + left * r)] = slab[l + left * a];
                }
            }
        }
        out
    }

    fn mode_strides(&self, modes: &[usize]) -> Vec<(usize, usize)> {
        // Listed modes increment slower from left to right.
        let mut stride = 1;
        let mut out = Vec::with_capacity(modes.len());
        for &m in modes.iter().rev() {
            out.push((m, stride));
            stride *= self.shape[m];
        }
        out
    }

    fn check_partition(order: usize, row_modes: &[usize], col_modes: &[usize]) -> Result<()> {
        let mut seen = vec![false; order];
        for &m in row_modes.iter().chain(col_modes) {
            if m >= order || seen[m] {
                return Err(Error::BadModePartition { order });
            }
            seen[m] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::BadModePartition { order })
        }
    }

    /// General matricization. Within each list, modes are given from slowest
    /// to fastest varying, so `general_unfold(&[1, 0], &[3, 2])` places entry
    /// `t[i0, i1, i2, i3]` at row `i0 + I0*i1` and column `i2 + I2*i3`.
    pub fn general_unfold(&self, row_modes: &[usize], col_modes: &[usize]) -> Result<Mat<T>> {
        Self::check_partition(self.order(), row_modes, col_modes)?;
        let rows: usize = row_modes.iter().map(|&m| self.shape[m]).product();
        let cols: usize = col_modes.iter().map(|&m| self.shape[m]).product();
        let rs = self.mode_strides(row_modes);
        let cs = self.mode_strides(col_modes);
        let mut out = Mat::zeros(rows, cols);
        let mut idx = vec![0; self.order()];
        for &x in &self.data {
            let r: usize = rs.iter().map(|&(m, s)| idx[m] * s).sum();
            let c: usize = cs.iter().map(|&(m, s)| idx[m] * s).sum();
            out[(r, c)] = x;
            advance(&mut idx, &self.shape);
        }
        Ok(out)
    }

    /// Inverse of [`DenseTensor::general_unfold`].
    pub fn refold(
        m: &Mat<T>,
        row_modes: &[usize],
        col_modes: &[usize],
        shape: &[usize],
    ) -> Result<Self> {
        check_shape(shape)?;
        Self::check_partition(shape.len(), row_modes, col_modes)?;
        let rows: usize = row_modes.iter().map(|&k| shape[k]).product();
        let cols: usize = col_modes.iter().map(|&k| shape[k]).product();
        if (rows, cols) != m.shape() {
            return Err(Error::dims(format!(
                "matrix is {:?}, refold into {shape:?} needs ({rows}, {cols})",
                m.shape()
            )));
        }
        let mut out = Self::zeros(shape.to_vec())?;
        let rs = out.mode_strides(row_modes);
        let cs = out.mode_strides(col_modes);
        let mut idx = vec![0; shape.len()];
        for x in out.data.iter_mut() {
            let r: usize = rs.iter().map(|&(k, s)| idx[k] * s).sum();
            let c: usize = cs.iter().map(|&(k, s)| idx[k] * s).sum();
            *x = m[(r, c)];
            advance(&mut idx, shape);
        }
        Ok(out)
    }

    /// Mode product `t ·_mode a`: the mode-`mode` unfolding of the result is
    /// `a` times the mode-`mode` unfolding of `t`.
    pub fn mode_product(&self, a: &Mat<T>, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let (left, extent, right) = self.split_at_mode(mode);
        if a.ncols() != extent {
            return Err(Error::dims(format!(
                "matrix with {} columns cannot act on mode {mode} of extent {extent}",
                a.ncols()
            )));
        }
        let new_extent = a.nrows();
        let mut shape = self.shape.clone();
        shape[mode] = new_extent;
        let mut data = vec![T::zero(); left * new_extent * right];
        if left == 1 {
            let x = DMatrixView::from_slice(&self.data, extent, right);
            let mut y = DMatrixViewMut::from_slice(&mut data, new_extent, right);
            y.gemm(T::one(), a, &x, T::zero());
        } else {
            let at = a.transpose();
            for r in 0..right {
                let x = DMatrixView::from_slice(
                    &self.data[r * left * extent..(r + 1) * left * extent],
                    left,
                    extent,
                );
                let mut y = DMatrixViewMut::from_slice(
                    &mut data[r * left * new_extent..(r + 1) * left * new_extent],
                    left,
                    new_extent,
                );
                y.gemm(T::one(), &x, &at, T::zero());
            }
        }
        Ok(Self { shape, data })
    }

    /// Order-3 subtensor keeping modes 0, 1 and `n` with every other index at 0.
    pub fn subtensor3(&self, n: usize) -> Result<Self> {
        if self.order() < 3 {
            return Err(Error::OrderMismatch {
                expected: 3,
                found: self.order(),
            });
        }
        if n < 2 || n >= self.order() {
            return Err(Error::BadMode {
                mode: n,
                order: self.order(),
            });
        }
        let (i0, i1, ik) = (self.shape[0], self.shape[1], self.shape[n]);
        let stride: usize = self.shape[..n].iter().product();
        let mut data = Vec::with_capacity(i0 * i1 * ik);
        for k in 0..ik {
            let base = k * stride;
            data.extend_from_slice(&self.data[base..base + i0 * i1]);
        }
        Ok(Self {
            shape: vec![i0, i1, ik],
            data,
        })
    }

    /// Order-3 view `(I0, I1, I2·…·I(N-1))`, trailing modes flattened with mode 2 fastest.
    pub fn reshape_to_order3(&self) -> Result<Self> {
        if self.order() < 3 {
            return Err(Error::OrderMismatch {
                expected: 3,
                found: self.order(),
            });
        }
        let trailing = self.shape[2..].iter().product();
        self.reshape(vec![self.shape[0], self.shape[1], trailing])
    }

    /// Frontal slice `t(:, :, k)` of an order-3 tensor.
    pub fn frontal_slice(&self, k: usize) -> Result<Mat<T>> {
        if self.order() != 3 {
            return Err(Error::OrderMismatch {
                expected: 3,
                found: self.order(),
            });
        }
        if k >= self.shape[2] {
            return Err(Error::BadIndex {
                index: k,
                extent: self.shape[2],
            });
        }
        let n = self.shape[0] * self.shape[1];
        Ok(Mat::from_column_slice(
            self.shape[0],
            self.shape[1],
            &self.data[k * n..(k + 1) * n],
        ))
    }
}
