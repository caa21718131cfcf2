mod common;

use common::{brute_force_full, c, gaussian, gaussian_factors, rel_diff, rng, uniform_factors, unitary};
use qzcpd::cpd::{
    add_noise_snr, add_noise_with, assignment, compress_for_rank, cpdqz, cpdqzs, decompose, decompose_any,
    extract_diag_factor, extract_diag_factors, factor_match_error, gevd, matching_cost, mlsvd_compress,
    realized_snr_db, recover_first_two_factors, scaled_error, select_pencil, trial_rng, triangularize,
    CpdOptions, Method, NoiseSpec, PencilStrategy,
};
use qzcpd::linalg::{fro, max_strict_lower, unitarity_defect};
use qzcpd::{AnyTensor, Complex64, CpdModel, DenseTensor, Error, Mat, Scalar};
use rand::Rng;

fn opts() -> CpdOptions {
    CpdOptions::default()
}

fn full<T: Scalar>(m: &CpdModel<T>) -> DenseTensor<T> {
    m.full().unwrap()
}

// ---------------------------------------------------------------------------
// compression and pencil

#[test]
fn mlsvd_reproduces_low_multilinear_rank_input() {
    let mut r = rng(20);
    let truth = gaussian_factors::<f64>(&mut r, &[6, 6, 6], 2);
    let t = full(&truth);
    let ml = mlsvd_compress(&t, &[2, 2, 2]).unwrap();
    assert_eq!(ml.core.shape(), &[2, 2, 2]);
    for f in &ml.factors {
        assert!(unitarity_defect(f) <= 1e-12 * 2f64.sqrt());
    }
    assert!(rel_diff(ml.expand().unwrap().data(), t.data()) <= 1e-12);
}

#[test]
fn mlsvd_without_truncation_preserves_norm() {
    let mut r = rng(21);
    let t = DenseTensor::from_fn(vec![3, 4, 2], |_| Complex64::standard_normal(&mut r)).unwrap();
    let ml = mlsvd_compress(&t, &[3, 4, 2]).unwrap();
    for f in &ml.factors {
        assert!(unitarity_defect(f) <= 1e-12 * (f.ncols() as f64).sqrt());
    }
    assert!((ml.core.norm() - t.norm()).abs() <= 1e-12 * t.norm());
    assert!(rel_diff(ml.expand().unwrap().data(), t.data()) <= 1e-12);
}

#[test]
fn mlsvd_of_rank_one_is_a_scalar() {
    let mut r = rng(22);
    let t = full(&gaussian_factors::<f64>(&mut r, &[3, 4, 5], 1));
    let ml = mlsvd_compress(&t, &[1, 1, 1]).unwrap();
    assert!((ml.core.data()[0].abs() - t.norm()).abs() <= 1e-12 * t.norm());
}

#[test]
fn mlsvd_wide_unfolding_path() {
    // Mode-0 unfolding is 6 x 40_000: the Gram path.
    let mut r = rng(23);
    let truth = gaussian_factors::<f64>(&mut r, &[6, 200, 200], 3);
    let t = full(&truth);
    let ml = mlsvd_compress(&t, &[3, 3, 3]).unwrap();
    assert!(rel_diff(ml.expand().unwrap().data(), t.data()) <= 1e-11);
}

#[test]
fn mlsvd_rejects_bad_targets() {
    let t = DenseTensor::<f64>::zeros(vec![2, 2, 2]).unwrap();
    assert!(matches!(mlsvd_compress(&t, &[3, 2, 2]), Err(Error::DimMismatch(_))));
    assert!(matches!(mlsvd_compress(&t, &[2, 2]), Err(Error::DimMismatch(_))));
}

#[test]
fn default_pencil_is_the_first_two_slices() {
    let mut r = rng(24);
    let core = DenseTensor::from_fn(vec![3, 3, 4], |_| r.random::<f64>()).unwrap();
    let p = select_pencil(&core, PencilStrategy::FirstTwoCoreSlices).unwrap();
    assert_eq!(p.m1, core.frontal_slice(0).unwrap());
    assert_eq!(p.m2, core.frontal_slice(1).unwrap());
}

#[test]
fn random_pencil_is_deterministic_and_follows_slice_linearity() {
    let mut r = rng(25);
    let truth = gaussian_factors::<f64>(&mut r, &[4, 4, 3, 2], 4);
    let t = full(&truth);
    let strategy = PencilStrategy::RandomCombinations { seed: 99 };
    let p = select_pencil(&t, strategy).unwrap();
    let q = select_pencil(&t, strategy).unwrap();
    assert_eq!(p.m1, q.m1);
    assert_eq!(p.m2, q.m2);

    // Slice (i2, i3) = U0·diag(U2(i2,:)∘U3(i3,:))·U1ᵀ, so a combination with
    // weights w is U0·diag(Σ w_k W(k,:))·U1ᵀ with W = U3 ⊙ U2.
    let w = qzcpd::tensor::khatri_rao(truth.factor(3), truth.factor(2)).unwrap();
    for (m, weights) in [(&p.m1, &p.weights.0), (&p.m2, &p.weights.1)] {
        let d = nalgebra::DVector::from_fn(4, |col, _| (0..6).map(|k| weights[k] * w[(k, col)]).sum::<f64>());
        let oracle = truth.factor(0) * Mat::from_diagonal(&d) * truth.factor(1).transpose();
        assert!(fro(&(m - &oracle)) <= 1e-12 * fro(&oracle));
    }
}

// ---------------------------------------------------------------------------
// factor extraction

#[test]
fn diagonal_fibers_of_triangular_slices() {
    let mut r = rng(26);
    let mut u0 = gaussian::<f64>(&mut r, 3, 3);
    let mut u1 = gaussian::<f64>(&mut r, 3, 3);
    for i in 0..3 {
        for j in 0..3 {
            if i > j {
                u0[(i, j)] = 0.0;
            }
            if i < j {
                u1[(i, j)] = 0.0;
            }
        }
    }
    let u2 = gaussian::<f64>(&mut r, 4, 3);
    let t = full(&CpdModel::new(vec![u0.clone(), u1.clone(), u2.clone()]).unwrap());
    for k in 0..4 {
        assert!(max_strict_lower(&t.frontal_slice(k).unwrap()) <= 1e-14);
    }
    let est = extract_diag_factor(&t, 2).unwrap();
    for col in 0..3 {
        let scale = u0[(col, col)] * u1[(col, col)];
        for i in 0..4 {
            assert!((est[(i, col)] - scale * u2[(i, col)]).abs() <= 1e-13);
        }
    }
}

#[test]
fn rank_one_diagonal_fiber() {
    let t = DenseTensor::from_fn(vec![1, 1, 3], |i| i[2] as f64 + 1.0).unwrap();
    let f = extract_diag_factors(&t).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].as_slice(), &[1.0, 2.0, 3.0]);
}

#[test]
fn extracted_third_factor_after_qz_matches_truth() {
    let mut r = rng(27);
    let truth = gaussian_factors::<f64>(&mut r, &[5, 5, 4], 3);
    let t = full(&truth);
    let tri = triangularize(&t, 3, PencilStrategy::FirstTwoCoreSlices).unwrap();
    let u2 = tri.mlsvd.factors[2].clone() * extract_diag_factor(&tri.t_qz, 2).unwrap();
    let a = CpdModel::new(vec![truth.factor(2).clone()]).unwrap();
    let b = CpdModel::new(vec![u2]).unwrap();
    assert!(factor_match_error(&a, &b).unwrap().max_rel_error <= 1e-10);
}

#[test]
fn first_two_factors_from_known_higher_factors() {
    let mut r = rng(28);
    let truth = gaussian_factors::<f64>(&mut r, &[4, 4, 3], 2);
    let t = full(&truth);
    let (u0, u1, res) = recover_first_two_factors(&t, &[truth.factor(2).clone()]).unwrap();
    assert_eq!(res.len(), 2);
    assert!(res.iter().all(|&x| x <= 1e-12));
    let est = CpdModel::new(vec![u0, u1, truth.factor(2).clone()]).unwrap();
    assert!(factor_match_error(&truth, &est).unwrap().max_rel_error <= 1e-10);
    assert!(rel_diff(full(&est).data(), t.data()) <= 1e-12);
}

#[test]
fn degenerate_higher_factors_are_reported() {
    let mut r = rng(29);
    let truth = gaussian_factors::<f64>(&mut r, &[4, 4, 3], 3);
    let t = full(&truth);
    let mut bad = truth.factor(2).clone();
    let first = bad.column(0).into_owned();
    bad.set_column(1, &first);
    assert!(matches!(
        recover_first_two_factors(&t, &[bad]),
        Err(Error::DegenerateHigherFactors)
    ));
}

// ---------------------------------------------------------------------------
// the three algorithms

#[test]
fn cpdqz_recovers_generic_order_four_tensor() {
    let mut r = rng(30);
    let truth = gaussian_factors::<f64>(&mut r, &[10, 10, 10, 10], 5);
    let rep = cpdqz(&full(&truth), 5, &opts()).unwrap();
    assert_eq!(rep.method, Method::Cpdqz);
    assert_eq!(rep.diagnostics.rank1_residuals.len(), 5);
    assert_eq!(rep.diagnostics.core_shape, vec![5, 5, 5, 5]);
    assert!(factor_match_error(&truth, &rep.model).unwrap().max_rel_error <= 1e-8);
}

#[test]
fn cpdqzs_recovers_generic_order_four_tensor() {
    let mut r = rng(31);
    let truth = gaussian_factors::<f64>(&mut r, &[8, 8, 8, 8], 4);
    let t = full(&truth);
    for pivot in [None, Some(2)] {
        let o = CpdOptions { pivot_mode: pivot, ..opts() };
        let rep = cpdqzs(&t, 4, &o).unwrap();
        assert_eq!(rep.diagnostics.rank1_residuals.len(), 4);
        assert!(factor_match_error(&truth, &rep.model).unwrap().max_rel_error <= 1e-8);
    }
}

#[test]
fn cpdqzs_rejects_bad_pivots() {
    let mut r = rng(32);
    let truth = gaussian_factors::<f64>(&mut r, &[5, 5, 2, 5], 4);
    let t = full(&truth);
    let bad_mode = CpdOptions { pivot_mode: Some(1), ..opts() };
    assert!(matches!(cpdqzs(&t, 4, &bad_mode), Err(Error::InvalidArgument(_))));
    let short = CpdOptions { pivot_mode: Some(2), ..opts() };
    assert!(matches!(cpdqzs(&t, 4, &short), Err(Error::SingularPivotFactor { mode: 2 })));
    assert!(factor_match_error(&truth, &cpdqzs(&t, 4, &opts()).unwrap().model).unwrap().max_rel_error <= 1e-8);
}

#[test]
fn gevd_recovers_generic_order_three_tensor_and_agrees_with_cpdqz() {
    let mut r = rng(33);
    let truth = gaussian_factors::<f64>(&mut r, &[6, 6, 6], 3);
    let t = full(&truth);
    let g = gevd(&t, 3, &opts()).unwrap();
    assert!(factor_match_error(&truth, &g.model).unwrap().max_rel_error <= 1e-8);
    let q = cpdqz(&t, 3, &opts()).unwrap();
    assert!(factor_match_error(&g.model, &q.model).unwrap().max_rel_error <= 1e-8);
}

#[test]
fn rank_one_tensors_are_recovered_by_every_method() {
    let mut r = rng(34);
    for shape in [vec![3, 4, 5], vec![3, 2, 4, 3]] {
        let truth = gaussian_factors::<f64>(&mut r, &shape, 1);
        let t = full(&truth);
        for m in Method::ALL {
            let rep = decompose(&t, 1, m, &opts()).unwrap();
            let err = factor_match_error(&truth, &rep.model).unwrap().max_rel_error;
            assert!(err <= 1e-12, "{m} rank-1 error {err}");
        }
    }
}

#[test]
fn complex_tensors_are_supported() {
    let mut r = rng(35);
    let truth = gaussian_factors::<Complex64>(&mut r, &[6, 5, 4, 5], 4);
    let t = full(&truth);
    for m in Method::ALL {
        let rep = decompose(&t, 4, m, &opts()).unwrap();
        let err = factor_match_error(&truth, &rep.model).unwrap().max_rel_error;
        assert!(err <= 1e-8, "{m}: {err}");
    }
}

#[test]
fn random_pencil_also_recovers_the_cpd() {
    let mut r = rng(36);
    let truth = gaussian_factors::<f64>(&mut r, &[7, 7, 5, 4], 4);
    let t = full(&truth);
    let o = CpdOptions {
        pencil: PencilStrategy::RandomCombinations { seed: 5 },
        ..opts()
    };
    for m in Method::ALL {
        let rep = decompose(&t, 4, m, &o).unwrap();
        assert_eq!(rep.diagnostics.pencil, o.pencil);
        assert!(factor_match_error(&truth, &rep.model).unwrap().max_rel_error <= 1e-8);
    }
}

#[test]
fn rank_bounds_are_checked() {
    let t = DenseTensor::<f64>::zeros(vec![3, 2, 4]).unwrap();
    assert!(matches!(cpdqz(&t, 3, &opts()), Err(Error::DimMismatch(_))));
    assert!(matches!(gevd(&t, 0, &opts()), Err(Error::DimMismatch(_))));
    let m = DenseTensor::<f64>::zeros(vec![3, 3]).unwrap();
    assert!(matches!(cpdqz(&m, 2, &opts()), Err(Error::OrderMismatch { .. })));
}

#[test]
fn complex_fallback_promotes_real_tensors() {
    // Two real rank-1 terms can't reproduce a rotation-like pencil: the
    // slices [[1,0],[0,1]] and [[0,-1],[1,0]] have eigenvalues ±i.
    let t = DenseTensor::new(vec![2, 2, 2], vec![1.0, 0.0, 0.0, 1.0, 0.0, 1.0, -1.0, 0.0]).unwrap();
    let any = AnyTensor::Real(t);
    let strict = decompose_any(&any, 2, Method::Cpdqz, &opts());
    assert!(matches!(strict, Err(Error::RealPencilComplexEigenvalues { .. })));
    let o = CpdOptions {
        complex_fallback: true,
        ..opts()
    };
    let rep = decompose_any(&any, 2, Method::Cpdqz, &o).unwrap();
    assert_eq!(rep.model.field(), qzcpd::Field::Complex);
    assert_eq!(rep.diagnostics.warnings.len(), 1);
    let back = rep.model.to_complex().full().unwrap();
    assert!(rel_diff(back.data(), any.to_complex().data()) <= 1e-12);
}

// ---------------------------------------------------------------------------
// matching

fn permute_and_scale<T: Scalar>(m: &CpdModel<T>, perm: &[usize], r: &mut rand_chacha::ChaCha8Rng) -> CpdModel<T> {
    let factors = m
        .factors()
        .iter()
        .map(|f| {
            Mat::from_fn(f.nrows(), f.ncols(), |i, j| f[(i, perm[j])])
                * Mat::from_diagonal(&nalgebra::DVector::from_fn(f.ncols(), |_, _| {
                    T::from_real(0.5 + r.random::<f64>()) * if r.random::<bool>() { T::one() } else { -T::one() }
                }))
        })
        .collect();
    CpdModel::new(factors).unwrap()
}

#[test]
fn match_error_ignores_permutation_and_scaling() {
    let mut r = rng(40);
    let truth = gaussian_factors::<f64>(&mut r, &[4, 5, 3], 4);
    let est = permute_and_scale(&truth, &[2, 0, 3, 1], &mut r);
    let m = factor_match_error(&truth, &est).unwrap();
    assert!(m.max_rel_error <= 1e-13);
    assert_eq!(m.permutation, vec![1, 3, 0, 2]);

    let ct = gaussian_factors::<Complex64>(&mut r, &[3, 3, 3], 3);
    let factors = ct
        .factors()
        .iter()
        .map(|f| f * Mat::from_diagonal(&nalgebra::DVector::from_fn(3, |k, _| c(k as f64 + 1.0, 0.7))))
        .collect();
    let est = CpdModel::new(factors).unwrap();
    assert!(factor_match_error(&ct, &est).unwrap().max_rel_error <= 1e-13);
}

#[test]
fn match_error_of_a_perturbed_factor() {
    let mut r = rng(41);
    for rank in 2..=4 {
        let truth = gaussian_factors::<f64>(&mut r, &[5, 40, 5], rank);
        let e = gaussian::<f64>(&mut r, 40, rank);
        let e = &e * (0.01 * truth.factor(1).norm() / e.norm());
        let mut factors = truth.factors().to_vec();
        factors[1] += &e;
        let est = CpdModel::new(factors).unwrap();
        let m = factor_match_error(&truth, &est).unwrap();
        assert!((0.009..=0.011).contains(&m.max_rel_error), "{}", m.max_rel_error);

        // Exhaustive oracle: no other permutation gives a smaller error.
        let best = permutations(rank)
            .into_iter()
            .map(|p| {
                truth
                    .factors()
                    .iter()
                    .zip(est.factors())
                    .map(|(u, w)| scaled_error(u, w, &p))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((best - m.max_rel_error).abs() <= 1e-15);
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn assignment_agrees_with_factorial_oracle() {
    let mut r = rng(42);
    for rank in 1..=5 {
        for _ in 0..20 {
            let a = gaussian_factors::<f64>(&mut r, &[4, 3, 5], rank);
            let b = gaussian_factors::<f64>(&mut r, &[4, 3, 5], rank);
            let cost = matching_cost(&a, &b);
            let hungarian: f64 = assignment(&cost).iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum();
            let brute = permutations(rank)
                .into_iter()
                .map(|p| p.iter().enumerate().map(|(i, &j)| cost[(i, j)]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((hungarian - brute).abs() <= 1e-12);
        }
    }
}

#[test]
fn match_error_rejects_rank_mismatch() {
    let mut r = rng(43);
    let a = gaussian_factors::<f64>(&mut r, &[3, 3, 3], 2);
    let b = gaussian_factors::<f64>(&mut r, &[3, 3, 3], 3);
    assert!(matches!(factor_match_error(&a, &b), Err(Error::DimMismatch(_))));
}

// ---------------------------------------------------------------------------
// noise

#[test]
fn infinite_snr_is_a_no_op() {
    let mut r = rng(50);
    let t = full(&gaussian_factors::<f64>(&mut r, &[3, 3, 3], 2));
    let n = add_noise_snr(&t, NoiseSpec { snr_db: f64::INFINITY, seed: 1 }).unwrap();
    assert_eq!(n, t);
}

#[test]
fn realized_snr_matches_request() {
    let mut r = rng(51);
    let t = full(&gaussian_factors::<Complex64>(&mut r, &[4, 3, 5], 2));
    for snr in [-20.0, 0.0, 10.0, 37.5, 60.0] {
        let n = add_noise_snr(&t, NoiseSpec { snr_db: snr, seed: 3 }).unwrap();
        assert!((realized_snr_db(&t, &n) - snr).abs() <= 1e-10);
    }
}

#[test]
fn noise_is_reproducible_and_stream_dependent() {
    let mut r = rng(52);
    let t = full(&gaussian_factors::<f64>(&mut r, &[3, 4, 2], 2));
    let spec = NoiseSpec { snr_db: 20.0, seed: 8 };
    assert_eq!(add_noise_snr(&t, spec).unwrap(), add_noise_snr(&t, spec).unwrap());
    let a = add_noise_with(&t, 20.0, &mut trial_rng(8, 0)).unwrap();
    let b = add_noise_with(&t, 20.0, &mut trial_rng(8, 1)).unwrap();
    let a2 = add_noise_with(&t, 20.0, &mut trial_rng(8, 0)).unwrap();
    assert_ne!(a, b);
    assert_eq!(a, a2);
}

#[test]
fn noise_input_errors() {
    let z = DenseTensor::<f64>::zeros(vec![2, 2, 2]).unwrap();
    assert!(matches!(add_noise_snr(&z, NoiseSpec { snr_db: 10.0, seed: 0 }), Err(Error::ZeroInput)));
    let t = DenseTensor::from_fn(vec![2, 2, 2], |_| 1.0).unwrap();
    assert!(matches!(
        add_noise_snr(&t, NoiseSpec { snr_db: f64::NAN, seed: 0 }),
        Err(Error::InvalidArgument(_))
    ));
}

// ---------------------------------------------------------------------------
// whole-pipeline properties

#[test]
fn noiseless_exact_recovery_over_random_trials() {
    let mut r = rng(60);
    let mut failures = Vec::new();
    for trial in 0..200 {
        let order = if trial % 2 == 0 { 3 } else { 4 };
        let rank = r.random_range(2..=8);
        let shape: Vec<usize> = (0..order)
            .map(|n| if order == 4 && n >= 2 { rank + r.random_range(0..=2) } else { rank + r.random_range(0..=4) })
            .collect();
        let truth = uniform_factors(&mut r, &shape, rank);
        let t = full(&truth);
        for m in Method::ALL {
            let err = decompose(&t, rank, m, &opts())
                .and_then(|rep| factor_match_error(&truth, &rep.model))
                .map(|x| x.max_rel_error)
                .unwrap_or(f64::INFINITY);
            if err > 1e-7 {
                failures.push((trial, m, err));
            }
        }
    }
    // at least 99% of the trials per method
    for m in Method::ALL {
        let n = failures.iter().filter(|f| f.1 == m).count();
        assert!(n <= 2, "{m}: {n} failures {failures:?}");
    }
}

#[test]
fn qz_triangularizes_every_slice_of_every_subtensor() {
    let mut r = rng(61);
    for shape in [vec![6, 6, 5], vec![6, 7, 4, 5], vec![5, 5, 3, 4, 2]] {
        let truth = gaussian_factors::<f64>(&mut r, &shape, 3);
        let tri = triangularize(&full(&truth), 3, PencilStrategy::FirstTwoCoreSlices).unwrap();
        let scale = tri.mlsvd.core.norm();
        for n in 2..shape.len() {
            let sub = tri.t_qz.subtensor3(n).unwrap();
            for k in 0..sub.shape()[2] {
                assert!(max_strict_lower(&sub.frontal_slice(k).unwrap()) <= 1e-8 * scale);
            }
        }
        let flat = tri.t_qz.reshape_to_order3().unwrap();
        for k in 0..flat.shape()[2] {
            assert!(max_strict_lower(&flat.frontal_slice(k).unwrap()) <= 1e-8 * scale);
        }
    }
}

#[test]
fn transformed_first_two_factors_are_triangular() {
    let mut r = rng(62);
    let truth = gaussian_factors::<f64>(&mut r, &[7, 6, 5, 4], 4);
    let t = full(&truth);
    let tri = triangularize(&t, 4, PencilStrategy::FirstTwoCoreSlices).unwrap();
    let est = cpdqz(&t, 4, &opts()).unwrap();
    let perm = factor_match_error(&truth, &est.model).unwrap().permutation;
    let mut inv = vec![0; 4];
    for (truth_col, &est_col) in perm.iter().enumerate() {
        inv[est_col] = truth_col;
    }
    let core_factor = |n: usize| tri.mlsvd.factors[n].adjoint() * truth.factor(n);
    let ordered = |m: Mat<f64>| Mat::from_fn(4, 4, |i, j| m[(i, inv[j])]);
    let a = ordered(&tri.qz.q * core_factor(0));
    let b = ordered(tri.qz.z.transpose() * core_factor(1));
    assert!(max_strict_lower(&a) <= 1e-8 * fro(&a));
    assert!(max_strict_lower(&b.transpose()) <= 1e-8 * fro(&b));
}

#[test]
fn cpdqz_and_cpdqzs_coincide_on_order_three() {
    let mut r = rng(63);
    for _ in 0..10 {
        let rank = r.random_range(1..=5);
        let shape = [rank + 2, rank + 1, rank + r.random_range(0..3)];
        let t = full(&gaussian_factors::<f64>(&mut r, &shape, rank));
        let a = cpdqz(&t, rank, &opts()).unwrap().model;
        let b = cpdqzs(&t, rank, &opts()).unwrap().model;
        for (x, y) in a.factors().iter().zip(b.factors()) {
            assert!(fro(&(x - y)) <= 1e-12 * fro(x));
        }
    }
}

#[test]
fn higher_factors_are_invariant_under_unitary_transforms_of_the_first_modes() {
    let mut r = rng(64);
    let truth = gaussian_factors::<f64>(&mut r, &[6, 5, 4, 5], 4);
    let t = full(&truth);
    let v0 = unitary::<f64>(&mut r, 6);
    let v1 = unitary::<f64>(&mut r, 5);
    let moved = t.mode_product(&v0, 0).unwrap().mode_product(&v1, 1).unwrap();
    for m in [Method::Cpdqz, Method::Cpdqzs] {
        let a = decompose(&t, 4, m, &opts()).unwrap().model;
        let b = decompose(&moved, 4, m, &opts()).unwrap().model;
        let ha = CpdModel::new(a.factors()[2..].to_vec()).unwrap();
        let hb = CpdModel::new(b.factors()[2..].to_vec()).unwrap();
        assert!(factor_match_error(&ha, &hb).unwrap().max_rel_error <= 1e-9);
    }
}

#[test]
fn reconstruction_of_recovered_model_matches_brute_force() {
    let mut r = rng(65);
    let truth = gaussian_factors::<f64>(&mut r, &[4, 4, 3, 3], 3);
    let t = full(&truth);
    let est = cpdqzs(&t, 3, &opts()).unwrap().model;
    assert!(rel_diff(brute_force_full(&est).data(), t.data()) <= 1e-10);
}

#[test]
fn compression_targets_follow_rank() {
    let mut r = rng(66);
    let t = full(&gaussian_factors::<f64>(&mut r, &[6, 7, 3, 9], 4));
    let ml = compress_for_rank(&t, 4).unwrap();
    assert_eq!(ml.core.shape(), &[4, 4, 3, 4]);
}
