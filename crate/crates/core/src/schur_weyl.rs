//! Irreducible decomposition of `(ℂ^k)^{⊗n}` under the diagonal action `g ↦ g^{⊗n}`.
//!
//! The block PVM is read off the spectrum of a generic linear combination of
//! Jucys–Murphy elements `X_m = Σ_{i<m} (i m)`. Their joint eigenvectors form a
//! Gelfand–Tsetlin basis of each symmetric-group irrep, so every eigenspace of
//! a generic combination is `V_λ ⊗ |T⟩` for a single standard tableau `T`: an
//! irreducible subspace of the tensor action. The construction needs only the
//! `n(n-1)/2` transpositions and one eigendecomposition.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::limits;
use crate::linalg::{self, c, CMat};
use crate::numerics;
use crate::operator_algebra::{cluster_descending, kron_power, tensor_power, HermitianOperator, Pvm};
use crate::random;

const MODULE: &str = "schur_weyl";

/// Consecutive eigenvalues closer than this fraction of the range share a block.
pub const CLUSTER_GAP: f64 = 1e-6;
/// Gaps between this fraction of the range and `CLUSTER_GAP` are ambiguous.
pub const NOISE_GAP: f64 = 1e-10;
pub const MAX_ATTEMPTS: usize = 5;
pub const COMMUTATOR_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-7;

/// Orthogonal decomposition of `H^{⊗n}` into irreducible subspaces.
#[derive(Debug, Clone)]
pub struct IrreducibleDecomposition {
    pub n: usize,
    pub k: usize,
    pub blocks: Pvm,
    pub block_dims: Vec<usize>,
    /// Eigenvalue of the generic commutant element on each block.
    pub cluster_values: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl IrreducibleDecomposition {
    /// `w(E^n)`.
    pub fn max_block_dim(&self) -> usize {
        self.block_dims.iter().copied().max().unwrap_or(0)
    }

    /// `(n+1)^{k-1}`.
    pub fn dimension_bound(&self) -> u128 {
        (self.n as u128 + 1).pow(self.k as u32 - 1)
    }

    pub fn dim(&self) -> usize {
        self.blocks.dim()
    }
}

fn digits_swapped(mut x: usize, n: usize, k: usize, i: usize, j: usize) -> usize {
    // Factor 0 is the most significant base-k digit, matching kron(A_0, A_1, …).
    let pow = |t: usize| k.pow((n - 1 - t) as u32);
    let di = (x / pow(i)) % k;
    let dj = (x / pow(j)) % k;
    x -= di * pow(i) + dj * pow(j);
    x + dj * pow(i) + di * pow(j)
}

/// Permutation operator exchanging tensor factors `i` and `j` of `(ℂ^k)^{⊗n}`.
pub fn swap_unitary(n: usize, k: usize, i: usize, j: usize) -> Result<HermitianOperator> {
    if !(i < j && j < n) {
        return Err(Error::new(
            MODULE,
            "swap_unitary",
            ErrorKind::IndexOutOfRange { index: j.max(i), bound: n },
        ));
    }
    let dim = limits::checked_power_dim(k, n, MODULE, "swap_unitary")?;
    let mut m = CMat::zeros(dim, dim);
    for x in 0..dim {
        m[(digits_swapped(x, n, k, i, j), x)] = linalg::ONE;
    }
    Ok(HermitianOperator::from_matrix_unchecked(m))
}

/// `A = Σ_{m=2}^{n} c_m X_m` with `X_m` the sum of transpositions `(i, m-1)`, `i < m-1`
/// (zero-based factors). `coefficients[0]` multiplies `X_2`.
pub fn commutant_generic_element(n: usize, k: usize, coefficients: &[f64]) -> Result<HermitianOperator> {
    let op = "commutant_generic_element";
    if n == 0 || k == 0 {
        return Err(Error::new(MODULE, op, ErrorKind::InvalidParameter("n and k must be positive".into())));
    }
    if coefficients.len() != n - 1 {
        return Err(Error::new(
            MODULE,
            op,
            ErrorKind::InvalidParameter(format!("expected {} coefficients, got {}", n - 1, coefficients.len())),
        ));
    }
    let scale = coefficients.iter().fold(0.0_f64, |m, c| m.max(c.abs())).max(1.0);
    for (a, &ca) in coefficients.iter().enumerate() {
        if ca.abs() <= 1e-12 * scale || coefficients[a + 1..].iter().any(|&cb| (ca - cb).abs() <= 1e-12 * scale) {
            return Err(Error::new(MODULE, op, ErrorKind::DegenerateCoefficients));
        }
    }
    let dim = limits::checked_power_dim(k, n, MODULE, op)?;
    let mut m = CMat::zeros(dim, dim);
    for (idx, &cm) in coefficients.iter().enumerate() {
        let last = idx + 1;
        for i in 0..last {
            for x in 0..dim {
                m[(digits_swapped(x, n, k, i, last), x)] += c(cm, 0.0);
            }
        }
    }
    Ok(HermitianOperator::from_matrix_unchecked(m))
}

/// `C(n+k-1, k-1)`, the dimension of the symmetric subspace of `(ℂ^k)^{⊗n}`.
pub fn repeated_combination(k: usize, n: usize) -> u128 {
    if k == 0 {
        return 0;
    }
    numerics::binomial((n + k - 1) as u64, (k - 1) as u64)
}

fn draw_coefficients(n: usize, seed: u64, attempt: usize) -> Vec<f64> {
    let mut rng = random::labeled_rng(seed, &format!("{MODULE}/coefficients/{attempt}"));
    let span = 2f64.ln();
    (1..n).map(|_| (rng.random::<f64>() * span).exp()).collect()
}

enum Clustering {
    Clean(IrreducibleDecomposition),
    Ambiguous,
}

fn cluster_attempt(n: usize, k: usize, coefficients: Vec<f64>) -> Result<Clustering> {
    let a = commutant_generic_element(n, k, &coefficients)?;
    let e = a.eigh()?;
    let range = e.values[0] - e.values[e.values.len() - 1];
    if range > 0.0 {
        let ambiguous = e
            .values
            .windows(2)
            .map(|w| (w[0] - w[1]) / range)
            .any(|g| g > NOISE_GAP && g <= CLUSTER_GAP);
        if ambiguous {
            return Ok(Clustering::Ambiguous);
        }
    }
    let clusters = cluster_descending(&e.values, CLUSTER_GAP);
    let mut bases = Vec::with_capacity(clusters.len());
    let mut cluster_values = Vec::with_capacity(clusters.len());
    for r in &clusters {
        cluster_values.push(e.values[r.clone()].iter().sum::<f64>() / r.len() as f64);
        bases.push(linalg::select_columns(&e.vectors, r.clone()));
    }
    let block_dims: Vec<usize> = bases.iter().map(|b| b.ncols()).collect();
    let bound = (n as u128 + 1).pow(k as u32 - 1);
    if block_dims.iter().any(|&d| d as u128 > bound) {
        // An accidental coincidence merged two irreducible blocks.
        return Ok(Clustering::Ambiguous);
    }
    let labels = (0..bases.len()).map(|i| format!("irrep{i}")).collect();
    let blocks = Pvm::from_bases(bases, labels)?;
    Ok(Clustering::Clean(IrreducibleDecomposition { n, k, blocks, block_dims, cluster_values, coefficients }))
}

/// Builds `E^n` and validates it: ranks, the `(n+1)^{k-1}` bound, commutation
/// with random `ρ^{⊗n}` and invariance of every block under random `g^{⊗n}`.
pub fn irreducible_decomposition(n: usize, k: usize, seed: u64) -> Result<IrreducibleDecomposition> {
    let op = "irreducible_decomposition";
    if n == 0 || k == 0 {
        return Err(Error::new(MODULE, op, ErrorKind::InvalidParameter("n and k must be positive".into())));
    }
    let dim = limits::checked_power_dim(k, n, MODULE, op)?;
    let mut found = None;
    for attempt in 0..MAX_ATTEMPTS {
        if let Clustering::Clean(d) = cluster_attempt(n, k, draw_coefficients(n, seed, attempt))? {
            found = Some(d);
            break;
        }
    }
    let decomposition =
        found.ok_or_else(|| Error::new(MODULE, op, ErrorKind::ClusteringAmbiguous { attempts: MAX_ATTEMPTS }))?;

    let invalid = |why: String| Error::new(MODULE, op, ErrorKind::DecompositionInvalid(why));
    if decomposition.block_dims.iter().sum::<usize>() != dim {
        return Err(invalid("block ranks do not sum to k^n".into()));
    }
    let mut rng = random::labeled_rng(seed, &format!("{MODULE}/validate"));
    for _ in 0..5 {
        let rho = random::random_density(k, &mut rng);
        let power = tensor_power(&rho, n)?;
        let norm = decomposition.blocks.max_commutator_norm(power.operator());
        if norm > COMMUTATOR_TOL {
            return Err(invalid(format!("block fails to commute with a tensor-power state ({norm:.3e})")));
        }
    }
    for _ in 0..3 {
        let g = random::random_invertible(k, &mut rng);
        let action = kron_power(&g, n, op)?;
        let leak = decomposition.blocks.bases().iter().map(|b| linalg::leakage(&action, b)).fold(0.0, f64::max);
        if leak > INVARIANCE_TOL {
            return Err(invalid(format!("block is not invariant under g^(⊗n) ({leak:.3e})")));
        }
    }
    Ok(decomposition)
}

/// Largest `‖[P, ρ^{⊗n}]‖_F` over blocks and sampled states. Samples cycle
/// through full-rank, rank-deficient and pure states.
pub fn verify_block_commutativity(d: &IrreducibleDecomposition, trials: usize, seed: u64) -> Result<f64> {
    let norms = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = random::labeled_rng(seed, &format!("{MODULE}/verify/{t}"));
            let rho = match t % 3 {
                0 => random::random_density(d.k, &mut rng),
                1 if d.k > 1 => {
                    let rank = rng.random_range(1..d.k);
                    random::random_rank_deficient(d.k, rank, &mut rng)
                }
                _ => random::random_pure(d.k, &mut rng),
            };
            let power = tensor_power(&rho, d.n)?;
            Ok(d.blocks.max_commutator_norm(power.operator()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// JSON view emitted by the `schur` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct SchurSummary {
    pub n: usize,
    pub k: usize,
    pub block_dims: Vec<usize>,
    pub w: usize,
    pub bound: u128,
    pub max_commutator_norm: f64,
}

impl SchurSummary {
    pub fn new(d: &IrreducibleDecomposition, max_commutator_norm: f64) -> Self {
        SchurSummary {
            n: d.n,
            k: d.k,
            block_dims: d.block_dims.clone(),
            w: d.max_block_dim(),
            bound: d.dimension_bound(),
            max_commutator_norm,
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::operator_algebra::{spectral, DensityOperator};

    fn multiset(dims: &[usize]) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &d in dims {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn swap_examples() {
        let s = swap_unitary(2, 2, 0, 1).unwrap();
        // e_a ⊗ e_b ↦ e_b ⊗ e_a: |01⟩ (index 1) ↔ |10⟩ (index 2).
        let want = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.matrix()[(i, j)].re, want[i][j]);
            }
        }
        let sq = &s * &s;
        assert!(linalg::max_abs(&(sq - linalg::identity(4))) == 0.0);

        let a = swap_unitary(3, 2, 0, 1).unwrap();
        let b = swap_unitary(3, 2, 1, 2).unwrap();
        let far = swap_unitary(3, 2, 0, 2).unwrap();
        let prod = a.matrix() * b.matrix() * a.matrix();
        assert_eq!(linalg::max_abs(&(prod - far.matrix())), 0.0);
        assert!(swap_unitary(3, 2, 1, 1).is_err());
        assert!(swap_unitary(3, 2, 0, 3).is_err());
    }

    #[test]
    fn commutant_element_for_two_copies_is_scaled_swap() {
        for k in 2..=3 {
            let a = commutant_generic_element(2, k, &[1.7]).unwrap();
            let d = spectral(&a, 1e-8).unwrap();
            assert!((d.eigenvalues[0] - 1.7).abs() < 1e-12 && (d.eigenvalues[1] + 1.7).abs() < 1e-12);
            assert_eq!(d.projectors.ranks(), vec![k * (k + 1) / 2, k * (k - 1) / 2]);
        }
    }

    #[test]
    fn commutant_element_commutes_with_tensor_powers() {
        let mut rng = random::labeled_rng(11, "test");
        let rho = random::random_density(3, &mut rng);
        let a = commutant_generic_element(2, 3, &[1.3]).unwrap();
        let power = tensor_power(&rho, 2).unwrap();
        assert!(crate::operator_algebra::commutator_norm(&a, power.operator()) < 1e-10);
    }

    #[test]
    fn commutant_element_three_qubits_spectrum() {
        let a = commutant_generic_element(3, 2, &[1.2, 1.9]).unwrap();
        let d = spectral(&a, 1e-8).unwrap();
        assert_eq!(d.eigenvalues.len(), 3);
        let mut ranks = d.projectors.ranks();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![2, 2, 4]);
    }

    #[test]
    fn commutant_element_rejects_degenerate_coefficients() {
        let err = commutant_generic_element(3, 2, &[1.5, 1.5]).unwrap_err();
        assert_eq!(err.kind, ErrorKind::DegenerateCoefficients);
        assert!(commutant_generic_element(3, 2, &[0.0, 1.5]).is_err());
        assert!(commutant_generic_element(3, 2, &[1.5]).is_err());
    }

    #[test]
    fn decomposition_small_cases() {
        for k in 1..=4 {
            let d = irreducible_decomposition(1, k, 0).unwrap();
            assert_eq!(d.block_dims, vec![k]);
        }
        let d = irreducible_decomposition(3, 2, 5).unwrap();
        assert_eq!(multiset(&d.block_dims), multiset(&[4, 2, 2]));
        assert_eq!(d.max_block_dim(), 4);
        let d = irreducible_decomposition(4, 2, 5).unwrap();
        assert_eq!(multiset(&d.block_dims), multiset(&[5, 3, 3, 3, 1, 1]));
        assert_eq!(d.block_dims.iter().sum::<usize>(), 16);
    }

    #[test]
    fn decomposition_matches_coupling_oracle_for_qubits() {
        for n in 1..=10 {
            let d = irreducible_decomposition(n, 2, 17).unwrap();
            let oracle = steinlab_oracles::qubit_coupling_blocks(n);
            assert_eq!(multiset(&d.block_dims), oracle, "n = {n}");
        }
    }

    #[test]
    fn commutant_dimension_is_seed_invariant() {
        for (n, k) in [(3, 3), (4, 2), (5, 2)] {
            let sq = |seed| irreducible_decomposition(n, k, seed).unwrap().block_dims.iter().map(|d| d * d).sum::<usize>();
            let reference = sq(1);
            for seed in 2..5 {
                assert_eq!(sq(seed), reference);
            }
        }
    }

    #[test]
    fn blocks_are_eigenspaces_of_the_commutant_element() {
        let d = irreducible_decomposition(4, 3, 9).unwrap();
        let a = commutant_generic_element(4, 3, &d.coefficients).unwrap();
        for (i, &lambda) in d.cluster_values.iter().enumerate() {
            let p = d.blocks.projector(i);
            let pap = p.matrix() * a.matrix() * p.matrix();
            assert!(linalg::max_abs(&(pap - p.matrix().scale(lambda))) < 1e-8);
        }
    }

    #[test]
    fn block_dims_respect_symmetric_space_bound() {
        for (n, k) in [(2, 2), (3, 2), (6, 2), (2, 3), (3, 3), (4, 3), (2, 4), (3, 4)] {
            let d = irreducible_decomposition(n, k, 3).unwrap();
            let w = d.max_block_dim() as u128;
            assert!(w <= repeated_combination(k, n), "n={n} k={k}");
            assert!(repeated_combination(k, n) <= d.dimension_bound());
            // The symmetric subspace is one of the blocks.
            assert_eq!(w, repeated_combination(k, n));
        }
    }

    #[test]
    fn repeated_combination_examples() {
        assert_eq!(repeated_combination(2, 3), 4);
        for n in 0..6 {
            assert_eq!(repeated_combination(1, n), 1);
        }
        assert_eq!(repeated_combination(3, 2), steinlab_oracles::count_monomials(3, 2) as u128);
        assert_eq!(repeated_combination(3, 2), 6);
        for (k, n) in [(2, 5), (3, 4), (4, 3)] {
            assert_eq!(repeated_combination(k, n), steinlab_oracles::count_monomials(k, n) as u128);
        }
    }

    #[test]
    fn commutativity_verification() {
        let d = irreducible_decomposition(3, 2, 2).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        let power = tensor_power(&mixed, 3).unwrap();
        assert!(d.blocks.max_commutator_norm(power.operator()) < 1e-12);
        assert!(verify_block_commutativity(&d, 20, 4).unwrap() <= 1e-8);

        let d2 = irreducible_decomposition(2, 3, 2).unwrap();
        let mut rng = random::labeled_rng(4, "pure");
        for _ in 0..5 {
            let psi = random::random_pure(3, &mut rng);
            let power = tensor_power(&psi, 2).unwrap();
            assert!(d2.blocks.max_commutator_norm(power.operator()) <= 1e-9);
        }
    }

    #[test]
    fn decomposition_is_deterministic_in_seed() {
        let a = irreducible_decomposition(4, 2, 42).unwrap();
        let b = irreducible_decomposition(4, 2, 42).unwrap();
        assert_eq!(a.block_dims, b.block_dims);
        assert_eq!(a.coefficients, b.coefficients);
    }
}
