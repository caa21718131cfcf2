use nalgebra::DVector;

use super::mlsvd::{mlsvd_compress, MlsvdResult};
use super::pencil::{select_pencil, PencilChoice, PencilStrategy};
use super::{CpdOptions, DecompositionReport, Diagnostics, Method};
use crate::error::{Error, Result};
use crate::linalg::{best_rank1, generalized_eigvecs, lstsq, QzResult};
use crate::scalar::Scalar;
use crate::tensor::{khatri_rao_chain, CpdModel, DenseTensor};
use crate::Mat;

/// Compressed core after the QZ step, with everything needed to inspect it.
#[derive(Clone, Debug)]
pub struct Triangularized<T: Scalar> {
    pub mlsvd: MlsvdResult<T>,
    /// `None` for rank 1, where the 1×1 core slices are already triangular.
    pub pencil: Option<PencilChoice<T>>,
    /// Identity transforms for rank 1, with `s` and `t` holding the first slice.
    pub qz: QzResult<T>,
    /// `core ·₀ Q ·₁ Zᵀ`: every slice becomes `Q·slice·Z`.
    pub t_qz: DenseTensor<T>,
}

fn check_problem<T: Scalar>(m: &DenseTensor<T>, rank: usize) -> Result<()> {
    if m.order() < 3 {
        return Err(Error::OrderMismatch {
            expected: 3,
            found: m.order(),
        });
    }
    let shape = m.shape();
    if rank == 0 || rank > shape[0].min(shape[1]) {
        return Err(Error::DimMismatch(format!(
            "rank {rank} must lie in 1..={} for extents {shape:?}",
            shape[0].min(shape[1])
        )));
    }
    Ok(())
}

/// MLSVD to `R × R × min(I_2, R) × …`.
pub fn compress_for_rank<T: Scalar>(m: &DenseTensor<T>, rank: usize) -> Result<MlsvdResult<T>> {
    check_problem(m, rank)?;
    let targets: Vec<usize> = m
        .shape()
        .iter()
        .enumerate()
        .map(|(n, &e)| if n < 2 { rank } else { e.min(rank) })
        .collect();
    mlsvd_compress(m, &targets)
}

/// Compression, pencil selection and the QZ step shared by CPDQZ and CPDQZS.
pub fn triangularize<T: Scalar>(
    m: &DenseTensor<T>,
    rank: usize,
    strategy: PencilStrategy,
) -> Result<Triangularized<T>> {
    let mlsvd = compress_for_rank(m, rank)?;
    let (pencil, qz) = if rank == 1 {
        let first = Mat::from_element(1, 1, mlsvd.core.data()[0]);
        let id = Mat::identity(1, 1);
        let qz = QzResult {
            q: id.clone(),
            z: id,
            s: first.clone(),
            t: first,
            sweeps: 0,
        };
        (None, qz)
    } else {
        let pencil = select_pencil(&mlsvd.core, strategy)?;
        let qz = T::qz(&pencil.m1, &pencil.m2)?;
        (Some(pencil), qz)
    };
    let t_qz = mlsvd
        .core
        .mode_product(&qz.q, 0)?
        .mode_product(&qz.z.transpose(), 1)?;
    Ok(Triangularized {
        mlsvd,
        pencil,
        qz,
        t_qz,
    })
}

/// Factor of mode `n ≥ 2` read off the diagonal fibers: column `r` is
/// `t_qz[n](r, r, :)`, the fiber along mode `n` with every other trailing index at 0.
pub fn extract_diag_factor<T: Scalar>(t_qz: &DenseTensor<T>, n: usize) -> Result<Mat<T>> {
    let sub = t_qz.subtensor3(n)?;
    let (r0, r1, rn) = (sub.shape()[0], sub.shape()[1], sub.shape()[2]);
    let rank = r0.min(r1);
    Ok(Mat::from_fn(rn, rank, |i, r| sub.data()[r + r0 * (r + r1 * i)]))
}

/// Diagonal-fiber factors for modes `2..N`.
pub fn extract_diag_factors<T: Scalar>(t_qz: &DenseTensor<T>) -> Result<Vec<Mat<T>>> {
    (2..t_qz.order()).map(|n| extract_diag_factor(t_qz, n)).collect()
}

/// Factors recovered by one least-squares solve followed by rank-1 peeling.
#[derive(Clone, Debug)]
pub struct Peeled<T: Scalar> {
    /// One factor per peeled mode, in ascending mode order.
    pub factors: Vec<Mat<T>>,
    /// Worst relative rank-1 residual met while peeling each column.
    pub residuals: Vec<f64>,
}

/// Solves `unfold(t; known_modes, peel_modes) = known · (⊙ peel factors)ᵀ` for
/// the Khatri-Rao product of the peel factors and splits each of its columns
/// into one vector per mode.
///
/// `known_modes` is ordered slow to fast and `known` has one row per
/// combination of their indices. `peel_modes` must be ascending; the highest
/// mode is split off first and the lowest mode keeps the column scale.
pub fn solve_and_peel<T: Scalar>(
    t: &DenseTensor<T>,
    known: &Mat<T>,
    known_modes: &[usize],
    peel_modes: &[usize],
) -> Result<Peeled<T>> {
    let col_modes: Vec<usize> = peel_modes.iter().rev().copied().collect();
    let unf = t.general_unfold(known_modes, &col_modes)?;
    let x = lstsq(known, &unf)?;
    let rank = known.ncols();
    let extents: Vec<usize> = peel_modes.iter().map(|&m| t.shape()[m]).collect();
    let mut factors: Vec<Mat<T>> = extents.iter().map(|&e| Mat::zeros(e, rank)).collect();
    let mut residuals = Vec::with_capacity(rank);
    for r in 0..rank {
        let column: DVector<T> = x.row(r).transpose();
        let (parts, worst) = peel(column, &extents)?;
        for (f, p) in factors.iter_mut().zip(parts) {
            f.set_column(r, &p);
        }
        residuals.push(worst);
    }
    Ok(Peeled { factors, residuals })
}

/// Splits a Kronecker-structured vector (first extent fastest) into its
/// factors by successive best rank-1 approximations.
fn peel<T: Scalar>(mut rest: DVector<T>, extents: &[usize]) -> Result<(Vec<DVector<T>>, f64)> {
    let mut parts = vec![DVector::zeros(0); extents.len()];
    let mut worst = 0.0f64;
    for k in (1..extents.len()).rev() {
        let high = extents[k];
        let low = rest.len() / high;
        let mat = Mat::from_column_slice(low, high, rest.as_slice());
        let r1 = best_rank1(&mat)?;
        worst = worst.max(r1.relative_residual);
        parts[k] = r1.v.map(|x| x.conjugate());
        rest = r1.u * T::from_real(r1.sigma);
    }
    parts[0] = rest;
    Ok((parts, worst))
}

/// `U⁽⁰⁾` and `U⁽¹⁾` from the higher-mode factors via the Khatri-Rao solve.
pub fn recover_first_two_factors<T: Scalar>(
    t: &DenseTensor<T>,
    higher: &[Mat<T>],
) -> Result<(Mat<T>, Mat<T>, Vec<f64>)> {
    let n = t.order();
    if higher.len() + 2 != n {
        return Err(Error::DimMismatch(format!(
            "{} higher factors for a tensor of order {n}",
            higher.len()
        )));
    }
    let rev: Vec<&Mat<T>> = higher.iter().rev().collect();
    let known = khatri_rao_chain(&rev)?;
    let known_modes: Vec<usize> = (2..n).rev().collect();
    let peeled = solve_and_peel(t, &known, &known_modes, &[0, 1]).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::DegenerateHigherFactors,
        other => other,
    })?;
    let mut it = peeled.factors.into_iter();
    let u0 = it.next().expect("two peeled factors");
    let u1 = it.next().expect("two peeled factors");
    Ok((u0, u1, peeled.residuals))
}

fn expand<T: Scalar>(mlsvd: &MlsvdResult<T>, core_factors: Vec<Mat<T>>) -> Result<CpdModel<T>> {
    let factors = mlsvd
        .factors
        .iter()
        .zip(core_factors)
        .map(|(f, u)| f * u)
        .collect();
    CpdModel::new(factors)
}

fn diagnostics<T: Scalar>(tri: &Triangularized<T>, strategy: PencilStrategy, residuals: Vec<f64>) -> Diagnostics {
    Diagnostics {
        pencil: strategy,
        core_shape: tri.mlsvd.core.shape().to_vec(),
        qz_sweeps: tri.qz.sweeps,
        rank1_residuals: residuals,
        warnings: Vec::new(),
    }
}

pub fn cpdqz<T: Scalar>(m: &DenseTensor<T>, rank: usize, opts: &CpdOptions) -> Result<DecompositionReport<T>> {
    let tri = triangularize(m, rank, opts.pencil)?;
    let higher = extract_diag_factors(&tri.t_qz)?;
    let (u0, u1, residuals) = recover_first_two_factors(&tri.mlsvd.core, &higher)?;
    let mut core_factors = vec![u0, u1];
    core_factors.extend(higher);
    let model = expand(&tri.mlsvd, core_factors)?;
    Ok(DecompositionReport {
        method: Method::Cpdqz,
        model,
        diagnostics: diagnostics(&tri, opts.pencil, residuals),
    })
}

/// CPDQZS with pivot mode `opts.pivot_mode` (default: the last mode).
/// For order-3 tensors with the default pivot this is the CPDQZ computation.
pub fn cpdqzs<T: Scalar>(m: &DenseTensor<T>, rank: usize, opts: &CpdOptions) -> Result<DecompositionReport<T>> {
    let order = m.order();
    let pivot = opts.pivot_mode.unwrap_or(order.saturating_sub(1));
    if order >= 3 && (pivot < 2 || pivot >= order) {
        return Err(Error::InvalidArgument(format!(
            "pivot mode must lie in 2..{order}, got {pivot}"
        )));
    }
    if order == 3 {
        let mut report = cpdqz(m, rank, opts)?;
        report.method = Method::Cpdqzs;
        return Ok(report);
    }
    let tri = triangularize(m, rank, opts.pencil)?;
    let singular = Error::SingularPivotFactor { mode: pivot };
    let u_pivot = extract_diag_factor(&tri.t_qz, pivot)?;
    if u_pivot.nrows() != rank {
        return Err(singular);
    }
    let others: Vec<usize> = (0..order).filter(|&n| n != pivot).collect();
    let peeled = solve_and_peel(&tri.mlsvd.core, &u_pivot, &[pivot], &others).map_err(|e| match e {
        Error::RankDeficient { .. } => singular,
        other => other,
    })?;
    let mut core_factors = peeled.factors;
    core_factors.insert(pivot, u_pivot);
    let model = expand(&tri.mlsvd, core_factors)?;
    Ok(DecompositionReport {
        method: Method::Cpdqzs,
        model,
        diagnostics: diagnostics(&tri, opts.pencil, peeled.residuals),
    })
}

/// Generalized-eigenvector baseline: `U⁽¹⁾ = V⁻ᵀ` from the pencil's
/// eigenvectors, the remaining factors by solving against it and peeling.
pub fn gevd<T: Scalar>(m: &DenseTensor<T>, rank: usize, opts: &CpdOptions) -> Result<DecompositionReport<T>> {
    let mlsvd = compress_for_rank(m, rank)?;
    let (u1, sweeps, warnings) = if rank == 1 {
        (Mat::identity(1, 1), 0, Vec::new())
    } else {
        let pencil = select_pencil(&mlsvd.core, opts.pencil)?;
        let eig = generalized_eigvecs(&pencil.m1, &pencil.m2)?;
        let u1 = lstsq(&eig.vectors.transpose(), &Mat::identity(rank, rank))?;
        let warnings = eig.warnings.iter().map(ToString::to_string).collect();
        (u1, eig.sweeps, warnings)
    };
    let order = m.order();
    let others: Vec<usize> = (0..order).filter(|&n| n != 1).collect();
    let peeled = solve_and_peel(&mlsvd.core, &u1, &[1], &others).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::SingularPivotFactor { mode: 1 },
        other => other,
    })?;
    let mut core_factors = peeled.factors;
    core_factors.insert(1, u1);
    let model = expand(&mlsvd, core_factors)?;
    Ok(DecompositionReport {
        method: Method::Gevd,
        model,
        diagnostics: Diagnostics {
            pencil: opts.pencil,
            core_shape: mlsvd.core.shape().to_vec(),
            qz_sweeps: sweeps,
            rank1_residuals: peeled.residuals,
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peel_splits_kronecker_vector() {
        let a = DVector::from_vec(vec![1.0, 2.0]);
        let b = DVector::from_vec(vec![3.0, -1.0, 0.5]);
        let c = DVector::from_vec(vec![0.25, 4.0]);
        // first extent fastest: index i + 2*(j + 3*k)
        let v = DVector::from_fn(12, |idx, _| {
            let (i, j, k) = (idx % 2, (idx / 2) % 3, idx / 6);
            a[i] * b[j] * c[k]
        });
        let (parts, worst) = peel(v, &[2, 3, 2]).unwrap();
        assert!(worst < 1e-14);
        for (p, truth) in parts.iter().zip([&a, &b, &c]) {
            let cos = p.dot(truth).abs() / (p.norm() * truth.norm());
            assert!((cos - 1.0).abs() < 1e-14);
        }
        let rebuilt = parts[0][1] * parts[1][2] * parts[2][1];
        assert!((rebuilt - a[1] * b[2] * c[1]).abs() < 1e-13);
    }
}
