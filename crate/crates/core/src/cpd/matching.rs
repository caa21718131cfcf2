use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::CpdModel;
use crate::Mat;

#[derive(Clone, Debug)]
pub struct MatchResult {
    /// Largest relative Frobenius error over the factors.
    pub max_rel_error: f64,
    pub per_factor: Vec<f64>,
    /// `permutation[r]` is the estimate column matched to truth column `r`.
    pub permutation: Vec<usize>,
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(n³)). Returns `assign[row] = column`.
pub fn assignment(cost: &Mat<f64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    // Potentials formulation with 1-based sentinels: way[j] is the previous
    // column on the augmenting path, p[j] the row matched to column j.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}

/// Matching cost `1 − mean_n |cos∠(truth_n(:, r), estimate_n(:, c))|`.
pub fn matching_cost<T: Scalar>(truth: &CpdModel<T>, estimate: &CpdModel<T>) -> Mat<f64> {
    let r = truth.rank();
    let n = truth.order() as f64;
    let mut cost = Mat::from_element(r, r, 1.0);
    for (u, w) in truth.factors().iter().zip(estimate.factors()) {
        let un: Vec<f64> = u.column_iter().map(|c| c.norm()).collect();
        let wn: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
        let g = u.adjoint() * w;
        for i in 0..r {
            for j in 0..r {
                let denom = un[i] * wn[j];
                let cos = if denom > 0.0 { g[(i, j)].modulus() / denom } else { 0.0 };
                cost[(i, j)] -= cos / n;
            }
        }
    }
    cost
}

/// Relative factor error after optimal column permutation and per-column,
/// per-factor least-squares scaling of the estimate.
pub fn factor_match_error<T: Scalar>(truth: &CpdModel<T>, estimate: &CpdModel<T>) -> Result<MatchResult> {
    if truth.rank() != estimate.rank() || truth.shape() != estimate.shape() {
        return Err(Error::DimMismatch(format!(
            "truth has shape {:?} and rank {}, estimate has shape {:?} and rank {}",
            truth.shape(),
            truth.rank(),
            estimate.shape(),
            estimate.rank()
        )));
    }
    let permutation = assignment(&matching_cost(truth, estimate));
    let per_factor = truth
        .factors()
        .iter()
        .zip(estimate.factors())
        .map(|(u, w)| scaled_error(u, w, &permutation))
        .collect::<Vec<_>>();
    let max_rel_error = per_factor.iter().copied().fold(0.0, f64::max);
    Ok(MatchResult {
        max_rel_error,
        per_factor,
        permutation,
    })
}

/// `‖U − Ŵ‖_F / ‖U‖_F` where column `r` of `Ŵ` is `w(:, perm[r])` scaled by
/// its least-squares fit to `u(:, r)`.
pub fn scaled_error<T: Scalar>(u: &Mat<T>, w: &Mat<T>, perm: &[usize]) -> f64 {
    let mut err = 0.0;
    for (r, &c) in perm.iter().enumerate() {
        let ur = u.column(r);
        let wc = w.column(c);
        let ww = wc.norm_squared();
        let lambda = if ww > 0.0 { wc.dotc(&ur).unscale(ww) } else { T::zero() };
        err += (ur - wc * lambda).norm_squared();
    }
    err.sqrt() / u.norm()
}
