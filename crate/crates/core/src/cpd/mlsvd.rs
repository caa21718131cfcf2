use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;
use crate::Mat;

/// Above this many entries a wide unfolding goes through its Gram matrix.
const GRAM_MIN_ENTRIES: usize = 100_000;

/// Truncated multilinear SVD: `m ≈ core ·₀ F0 ·₁ F1 ⋯`.
#[derive(Clone, Debug)]
pub struct MlsvdResult<T: Scalar> {
    pub core: DenseTensor<T>,
    /// Column-orthonormal `I_n × R_n` factor per mode.
    pub factors: Vec<Mat<T>>,
}

impl<T: Scalar> MlsvdResult<T> {
    /// `core` multiplied back through every mode factor.
    pub fn expand(&self) -> Result<DenseTensor<T>> {
        self.factors
            .iter()
            .enumerate()
            .try_fold(self.core.clone(), |acc, (n, f)| acc.mode_product(f, n))
    }
}

/// Compresses `m` to the multilinear ranks `target_ranks`.
///
/// Each factor holds the leading left singular vectors of the mode unfolding
/// of `m`; the core is `m` multiplied by the conjugate-transposed factors.
pub fn mlsvd_compress<T: Scalar>(m: &DenseTensor<T>, target_ranks: &[usize]) -> Result<MlsvdResult<T>> {
    if target_ranks.len() != m.order() {
        return Err(Error::DimMismatch(format!(
            "{} target ranks for a tensor of order {}",
            target_ranks.len(),
            m.order()
        )));
    }
    for (n, (&r, &extent)) in target_ranks.iter().zip(m.shape()).enumerate() {
        if r == 0 || r > extent {
            return Err(Error::DimMismatch(format!(
                "target rank {r} for mode {n} must lie in 1..={extent}"
            )));
        }
    }
    let factors = target_ranks
        .iter()
        .enumerate()
        .map(|(n, &r)| leading_left_vectors(&m.mode_unfolding(n), r))
        .collect::<Result<Vec<_>>>()?;
    let core = factors
        .iter()
        .enumerate()
        .try_fold(m.clone(), |acc, (n, f)| acc.mode_product(&f.adjoint(), n))?;
    Ok(MlsvdResult { core, factors })
}

fn leading_left_vectors<T: Scalar>(x: &Mat<T>, r: usize) -> Result<Mat<T>> {
    let (rows, cols) = x.shape();
    let dec = if cols < r || (cols > 4 * rows && rows * cols >= GRAM_MIN_ENTRIES) {
        // Left singular vectors of X are the eigenvectors of the Hermitian
        // Gram matrix X·Xᴴ, whose SVD is its eigendecomposition.
        svd(&(x * x.adjoint()))?
    } else {
        svd(x)?
    };
    Ok(dec.u.columns(0, r).into_owned())
}
