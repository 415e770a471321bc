use proptest::prelude::*;
use rand::SeedableRng;

use super::*;
use crate::linalg::{c, CMat, CVec};
use crate::random::{self, StreamRng};
use crate::ErrorKind;

fn plus_state() -> DensityOperator {
    DensityOperator::pure(&CVec::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap()
}

fn pauli_x() -> HermitianOperator {
    HermitianOperator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

fn rng(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

#[test]
fn construction_rejects_non_hermitian_and_non_states() {
    let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(matches!(HermitianOperator::new(m).unwrap_err().kind, ErrorKind::NotHermitian { .. }));
    assert!(DensityOperator::diagonal(&[0.6, 0.6]).is_err());
    assert!(DensityOperator::diagonal(&[1.2, -0.2]).is_err());
    assert!(TestOperator::new(HermitianOperator::diagonal(&[1.5, 0.0])).is_err());
}

#[test]
fn tensor_power_examples() {
    let pure = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
    let p3 = tensor_power(&pure, 3).unwrap();
    assert_eq!(p3.dim(), 8);
    assert_eq!(p3.matrix()[(0, 0)], c(1.0, 0.0));
    assert!((p3.operator().trace() - 1.0).abs() < 1e-15);
    let mixed = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
    let p2 = tensor_power(&mixed, 2).unwrap();
    for (i, want) in [0.09, 0.21, 0.21, 0.49].iter().enumerate() {
        assert!((p2.matrix()[(i, i)].re - want).abs() < 1e-15);
    }
    let r = random::random_density(3, &mut rng(1));
    assert_eq!(tensor_power(&r, 1).unwrap(), r);
}

#[test]
fn tensor_power_respects_dimension_cap() {
    let r = DensityOperator::maximally_mixed(2);
    let err = tensor_power(&r, 13).unwrap_err();
    assert!(matches!(err.kind, ErrorKind::DimensionCap { cap: 4096, .. }), "{err}");
    assert!(err.to_string().contains("4096"));
}

#[test]
fn spectral_examples() {
    let d = spectral(&HermitianOperator::diagonal(&[2.0, 2.0, 1.0]), 1e-8).unwrap();
    assert_eq!(d.eigenvalues.len(), 2);
    assert!((d.eigenvalues[0] - 2.0).abs() < 1e-14 && (d.eigenvalues[1] - 1.0).abs() < 1e-14);
    assert_eq!(d.projectors.ranks(), vec![2, 1]);

    let id = spectral(&HermitianOperator::identity(3), 1e-8).unwrap();
    assert_eq!(id.eigenvalues.len(), 1);
    assert_eq!(id.projectors.ranks(), vec![3]);

    // Pauli-x: eigenvalues ±1 with eigenvectors (1, ±1)/√2.
    let x = spectral(&pauli_x(), 1e-8).unwrap();
    assert!((x.eigenvalues[0] - 1.0).abs() < 1e-14 && (x.eigenvalues[1] + 1.0).abs() < 1e-14);
    let plus = HermitianOperator::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let minus = HermitianOperator::from_real_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]]).unwrap();
    assert!(x.projectors.projector(0).max_abs_diff(&plus) < 1e-14);
    assert!(x.projectors.projector(1).max_abs_diff(&minus) < 1e-14);
}

#[test]
fn spectral_rejects_nonpositive_tolerance() {
    assert!(spectral(&pauli_x(), 0.0).is_err());
}

#[test]
fn matrix_log_examples() {
    let half = DensityOperator::maximally_mixed(2);
    let l = matrix_log(&half, SupportMode::Strict).unwrap();
    let ln2 = 2f64.ln();
    assert!(l.max_abs_diff(&HermitianOperator::diagonal(&[-ln2, -ln2])) < 1e-14);

    let e = (-1f64).exp();
    let s = DensityOperator::diagonal(&[e, 1.0 - e]).unwrap();
    let l = matrix_log(&s, SupportMode::Strict).unwrap();
    assert!(l.max_abs_diff(&HermitianOperator::diagonal(&[-1.0, (1.0 - e).ln()])) < 1e-14);

    let u = random::haar_unitary(2, &mut rng(3));
    let rotated = DensityOperator::diagonal(&[0.2, 0.8]).unwrap().conjugated(&u);
    let l = matrix_log(&rotated, SupportMode::Strict).unwrap();
    let want = HermitianOperator::diagonal(&[0.2f64.ln(), 0.8f64.ln()]).conjugated(&u);
    assert!(l.max_abs_diff(&want) < 1e-12);
}

#[test]
fn matrix_log_singular_needs_restricted_mode() {
    let pure = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
    let err = matrix_log(&pure, SupportMode::Strict).unwrap_err();
    assert!(matches!(err.kind, ErrorKind::SingularState { .. }));
    let l = matrix_log(&pure, SupportMode::Restricted).unwrap();
    assert!(l.max_abs_diff(&HermitianOperator::zeros(2)) < 1e-15);
}

#[test]
fn matrix_neg_power_examples() {
    let id = DensityOperator::maximally_mixed(2);
    let p = matrix_neg_power(&id, 0.5).unwrap();
    assert!(p.max_abs_diff(&HermitianOperator::diagonal(&[2f64.sqrt(), 2f64.sqrt()])) < 1e-14);
    let s = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
    let p = matrix_neg_power(&s, 1.0).unwrap();
    assert!(p.max_abs_diff(&HermitianOperator::diagonal(&[4.0, 4.0 / 3.0])) < 1e-13);
    let p = matrix_neg_power(&s, 0.5).unwrap();
    assert!(p.max_abs_diff(&HermitianOperator::diagonal(&[2.0, 2.0 / 3f64.sqrt()])) < 1e-13);
    assert!(matrix_neg_power(&s, 0.0).is_err());
    assert!(matrix_neg_power(&DensityOperator::diagonal(&[1.0, 0.0]).unwrap(), 0.5).is_err());
}

#[test]
fn pinch_examples() {
    let r = random::random_density(3, &mut rng(4));
    let diag = pinch(&Pvm::computational_basis(3), r.operator()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { r.matrix()[(i, i)] } else { c(0.0, 0.0) };
            assert!((diag.matrix()[(i, j)] - want).norm() < 1e-15);
        }
    }
    let same = pinch(&Pvm::trivial(3), r.operator()).unwrap();
    assert!(same.max_abs_diff(r.operator()) < 1e-15);
    let own = spectral(r.operator(), 1e-8).unwrap().projectors;
    let fixed = pinch(&own, r.operator()).unwrap();
    assert!(fixed.distance(r.operator()) < 1e-10);
    assert!(pinch(&Pvm::trivial(2), r.operator()).is_err());
}

#[test]
fn relative_entropy_examples() {
    let r = random::random_density(3, &mut rng(5));
    assert!(relative_entropy(&r, &r).unwrap().abs() < 1e-10);

    let a = DensityOperator::diagonal(&[0.5, 0.5]).unwrap();
    let b = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
    let want = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
    assert!((relative_entropy(&a, &b).unwrap() - want).abs() < 1e-14);
    assert!((want - 0.14384).abs() < 1e-5);

    let d = relative_entropy(&plus_state(), &DensityOperator::maximally_mixed(2)).unwrap();
    assert!((d - 2f64.ln()).abs() < 1e-14);
}

#[test]
fn relative_entropy_support_violation_is_infinite() {
    let pure = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
    let other = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
    for mode in [SupportMode::Strict, SupportMode::Restricted] {
        let err = relative_entropy_with(&plus_state(), &other, mode).unwrap_err();
        assert!(matches!(err.kind, ErrorKind::InfiniteDivergence { .. }), "{err}");
    }
    // Contained support: strict mode asks for the restricted mode, which succeeds.
    let err = relative_entropy_with(&pure, &pure, SupportMode::Strict).unwrap_err();
    assert!(matches!(err.kind, ErrorKind::SingularState { .. }));
    assert!(relative_entropy_with(&pure, &pure, SupportMode::Restricted).unwrap().abs() < 1e-15);
}

#[test]
fn relative_log_variance_examples() {
    let half = DensityOperator::maximally_mixed(2);
    assert!(relative_log_variance(&half, &half).unwrap().abs() < 1e-15);

    let pure = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
    let s = DensityOperator::diagonal(&[0.4, 0.6]).unwrap();
    assert!(relative_log_variance_with(&pure, &s, SupportMode::Restricted).unwrap().abs() < 1e-15);

    let r = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
    let s = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
    let want = 0.3 * 0.7 * 3f64.ln().powi(2);
    assert!((relative_log_variance(&r, &s).unwrap() - want).abs() < 1e-14);
    assert!((want - 0.25346).abs() < 1e-5);
}

#[test]
fn refines_examples() {
    let basis = Pvm::computational_basis(3);
    let coarse = Pvm::from_projectors(
        &[HermitianOperator::diagonal(&[1.0, 1.0, 0.0]), HermitianOperator::diagonal(&[0.0, 0.0, 1.0])],
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    assert!(refines(&basis, &coarse));
    assert!(!refines(&coarse, &basis));
    assert!(refines(&coarse, &coarse));
    assert!(refines(&basis, &Pvm::trivial(3)));

    let hadamard = spectral(&pauli_x(), 1e-8).unwrap().projectors;
    assert!(!refines(&Pvm::computational_basis(2), &hadamard));
    assert!(!refines(&hadamard, &Pvm::computational_basis(2)));
}

#[test]
fn pvm_product_examples() {
    let r = random::random_rank_one_pvm(3, &mut rng(6));
    let p = pvm_product(&r, &Pvm::trivial(3)).unwrap();
    assert_eq!(p.len(), 3);
    assert!(refines(&p, &r) && refines(&r, &p));

    let basis = Pvm::computational_basis(3);
    let coarse = spectral(&HermitianOperator::diagonal(&[1.0, 1.0, 2.0]), 1e-8).unwrap().projectors;
    let p = pvm_product(&basis, &coarse).unwrap();
    assert_eq!(p.ranks(), vec![1, 1, 1]);
    assert!(refines(&p, &basis) && refines(&p, &coarse));

    // diag(1,1,2) and diag(3,4,4): eigenspaces {e0,e1},{e2} and {e0},{e1,e2} meet in three lines.
    let a = spectral(&HermitianOperator::diagonal(&[1.0, 1.0, 2.0]), 1e-8).unwrap().projectors;
    let b = spectral(&HermitianOperator::diagonal(&[3.0, 4.0, 4.0]), 1e-8).unwrap().projectors;
    let p = pvm_product(&a, &b).unwrap();
    assert_eq!(p.ranks(), vec![1, 1, 1]);
    assert!(refines(&p, &a) && refines(&p, &b));
    for i in 0..3 {
        let proj = p.projector(i);
        let lines: Vec<usize> = (0..3).filter(|&k| proj.matrix()[(k, k)].re > 0.5).collect();
        assert_eq!(lines.len(), 1);
    }
}

#[test]
fn pvm_product_rejects_non_commuting() {
    let hadamard = spectral(&pauli_x(), 1e-8).unwrap().projectors;
    let err = pvm_product(&Pvm::computational_basis(2), &hadamard).unwrap_err();
    match err.kind {
        ErrorKind::NonCommuting { norm } => assert!(norm > 0.5),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn pvm_validation_catches_non_orthogonal_elements() {
    let a = HermitianOperator::diagonal(&[1.0, 0.0]);
    let b = HermitianOperator::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    assert!(Pvm::from_projectors(&[a.clone(), b], vec!["a".into(), "b".into()]).is_err());
    assert!(Pvm::from_projectors(std::slice::from_ref(&a), vec!["a".into()]).is_err());
    assert!(Pvm::from_projectors(&[HermitianOperator::diagonal(&[0.5, 0.0])], vec!["x".into()]).is_err());
}

#[test]
fn measure_examples() {
    let out = measure(&DensityOperator::diagonal(&[0.3, 0.7]).unwrap(), &Pvm::computational_basis(2)).unwrap();
    assert!((out.probabilities[0] - 0.3).abs() < 1e-15 && (out.probabilities[1] - 0.7).abs() < 1e-15);
    assert_eq!(out.labels, vec!["0".to_string(), "1".to_string()]);
    let out = measure(&random::random_density(4, &mut rng(7)), &Pvm::trivial(4)).unwrap();
    assert_eq!(out.probabilities.len(), 1);
    assert!((out.probabilities[0] - 1.0).abs() < 1e-14);
    let out = measure(&plus_state(), &Pvm::computational_basis(2)).unwrap();
    assert!((out.probabilities[0] - 0.5).abs() < 1e-15 && (out.probabilities[1] - 0.5).abs() < 1e-15);
    assert!(measure(&plus_state(), &Pvm::trivial(3)).is_err());
}

#[test]
fn test_errors_examples() {
    let r = DensityOperator::diagonal(&[0.9, 0.1]).unwrap();
    let s = DensityOperator::diagonal(&[0.2, 0.8]).unwrap();
    let (a, b) = test_errors(&TestOperator::identity(2), &r, &s).unwrap();
    assert!(a.abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
    let (a, b) = test_errors(&TestOperator::zero(2), &r, &s).unwrap();
    assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15);
    let t = TestOperator::new(HermitianOperator::diagonal(&[1.0, 0.0])).unwrap();
    let (a, b) = test_errors(&t, &r, &s).unwrap();
    assert!((a - 0.1).abs() < 1e-15 && (b - 0.2).abs() < 1e-15);
}

#[test]
fn matrix_json_round_trip_and_validation() {
    let r = random::random_density(3, &mut rng(8));
    let text = serde_json::to_string(&r.operator().to_json()).unwrap();
    let back = DensityOperator::from_json(&MatrixJson::parse(&text).unwrap()).unwrap();
    assert!(back.operator().max_abs_diff(r.operator()) < 1e-15);
    let bad = MatrixJson { dim: 2, re: vec![vec![1.0, 2.0], vec![0.0, 1.0]], im: vec![] };
    assert!(HermitianOperator::from_json(&bad).is_err());
    assert!(MatrixJson::parse("{\"dim\":2}").is_err());
}

/// Density matrix commuting with a block PVM: random state inside each block.
fn block_state(blocks: &Pvm, rng: &mut StreamRng) -> DensityOperator {
    let weights = random::dirichlet_spectrum(blocks.len(), rng);
    let dim = blocks.dim();
    let mut acc = CMat::zeros(dim, dim);
    for (b, w) in blocks.bases().iter().zip(weights) {
        let local = random::random_density(b.ncols(), rng);
        acc += b * local.matrix() * b.adjoint() * c(w, 0.0);
    }
    DensityOperator::from_matrix(crate::linalg::hermitian_part(&acc)).unwrap()
}

fn random_block_pvm(dim: usize, rng: &mut StreamRng) -> Pvm {
    use rand::Rng;
    let u = random::haar_unitary(dim, rng);
    let blocks = rng.random_range(1..=dim);
    let mut cuts: Vec<usize> = (1..dim).collect();
    // Deterministic shuffle-free pick of cut points from the stream.
    let mut chosen = Vec::new();
    for _ in 0..blocks - 1 {
        let idx = rng.random_range(0..cuts.len());
        chosen.push(cuts.remove(idx));
    }
    chosen.sort_unstable();
    chosen.push(dim);
    let mut start = 0;
    let mut bases = Vec::new();
    for end in chosen {
        bases.push(crate::linalg::select_columns(&u, start..end));
        start = end;
    }
    let labels = (0..bases.len()).map(|i| i.to_string()).collect();
    Pvm::from_bases(bases, labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pinching_preserves_test_errors_for_commuting_states(seed in any::<u64>(), dim in 2usize..6) {
        let mut g = rng(seed);
        let e = random_block_pvm(dim, &mut g);
        let r = block_state(&e, &mut g);
        let s = block_state(&e, &mut g);
        let spectrum: Vec<f64> = (0..dim).map(|i| (i as f64 + 0.5) / dim as f64).collect();
        let u = random::haar_unitary(dim, &mut g);
        let a = TestOperator::new(HermitianOperator::diagonal(&spectrum).conjugated(&u)).unwrap();
        let pinched = TestOperator::new(pinch(&e, a.operator()).unwrap()).unwrap();
        let (a0, b0) = test_errors(&a, &r, &s).unwrap();
        let (a1, b1) = test_errors(&pinched, &r, &s).unwrap();
        prop_assert!((a0 - a1).abs() <= 1e-9 && (b0 - b1).abs() <= 1e-9);
    }

    #[test]
    fn pinch_is_trace_positivity_preserving_and_idempotent(seed in any::<u64>(), dim in 2usize..7) {
        let mut g = rng(seed);
        let e = random_block_pvm(dim, &mut g);
        let x = random::random_hermitian(dim, &mut g);
        let once = pinch(&e, &x).unwrap();
        let twice = pinch(&e, &once).unwrap();
        prop_assert!((once.trace() - x.trace()).abs() <= 1e-10);
        prop_assert!(twice.max_abs_diff(&once) <= 1e-10);
        prop_assert!(e.max_commutator_norm(&once) <= 1e-9);
        let r = random::random_density(dim, &mut g);
        prop_assert!(pinch(&e, r.operator()).unwrap().min_eigenvalue().unwrap() >= -1e-12);
    }

    #[test]
    fn measurements_are_normalized(seed in any::<u64>(), dim in 1usize..7) {
        let mut g = rng(seed);
        let e = random_block_pvm(dim.max(1), &mut g);
        let r = random::random_density(dim.max(1), &mut g);
        prop_assert!((measure(&r, &e).unwrap().total() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn relative_entropy_is_nonnegative_and_vanishes_only_on_equal_states(seed in any::<u64>(), dim in 2usize..6) {
        let mut g = rng(seed);
        let r = random::random_faithful_density(dim, 1e-3, &mut g);
        let s = random::random_faithful_density(dim, 1e-3, &mut g);
        let d = relative_entropy(&r, &s).unwrap();
        prop_assert!(d >= -1e-10);
        if r.operator().distance(s.operator()) > 1e-8 {
            prop_assert!(d > 0.0);
        }
        prop_assert!(relative_entropy(&r, &r).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn spectral_decomposition_reconstructs(seed in any::<u64>(), dim in 1usize..65) {
        let mut g = rng(seed);
        let x = random::random_hermitian(dim, &mut g);
        let d = spectral(&x, 1e-8).unwrap();
        prop_assert!(d.reconstruct().distance(&x) <= 1e-9);
        prop_assert!(d.eigenvalues.windows(2).all(|w| w[0] > w[1]));
    }
}
