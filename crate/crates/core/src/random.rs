//! Seeded random states, unitaries and PVMs.
//!
//! Every consumer draws from its own stream derived from the master seed by a
//! labeled hash, so adding a new experiment never perturbs existing draws.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use sha2::{Digest, Sha256};

use crate::linalg::{self, c, CMat, CVec};
use crate::operator_algebra::{DensityOperator, HermitianOperator, Pvm};

pub type StreamRng = ChaCha8Rng;

/// Derives a 64-bit seed from a master seed and a label path.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn labeled_rng(master: u64, label: &str) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, label))
}

fn complex_gaussian(rng: &mut impl Rng) -> crate::linalg::C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal folded back into `Q`.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniform point on the probability simplex, i.e. Dirichlet(1, …, 1).
pub fn dirichlet_spectrum(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Haar-rotated Dirichlet spectrum.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let spectrum = dirichlet_spectrum(dim, rng);
    let u = haar_unitary(dim, rng);
    DensityOperator::from_operator_unchecked(HermitianOperator::diagonal(&spectrum).conjugated(&u))
}

/// Random state whose smallest eigenvalue is at least `floor`.
pub fn random_faithful_density(dim: usize, floor: f64, rng: &mut impl Rng) -> DensityOperator {
    let spectrum: Vec<f64> = dirichlet_spectrum(dim, rng)
        .into_iter()
        .map(|p| floor + (1.0 - dim as f64 * floor) * p)
        .collect();
    let u = haar_unitary(dim, rng);
    DensityOperator::from_operator_unchecked(HermitianOperator::diagonal(&spectrum).conjugated(&u))
}

/// Random state of the given rank.
pub fn random_rank_deficient(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityOperator {
    let rank = rank.clamp(1, dim);
    let mut spectrum = dirichlet_spectrum(rank, rng);
    spectrum.resize(dim, 0.0);
    let u = haar_unitary(dim, rng);
    DensityOperator::from_operator_unchecked(HermitianOperator::diagonal(&spectrum).conjugated(&u))
}

pub fn random_pure_vector(dim: usize, rng: &mut impl Rng) -> CVec {
    let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

pub fn random_pure(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    DensityOperator::pure(&random_pure_vector(dim, rng)).expect("nonzero vector")
}

/// GUE-like Hermitian matrix with unit-scale entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = CMat::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    HermitianOperator::from_matrix_unchecked(linalg::hermitian_part(&g))
}

/// `U diag(s) V` with singular values in `[0.5, 1]`: invertible and norm-bounded.
pub fn random_invertible(dim: usize, rng: &mut impl Rng) -> CMat {
    let u = haar_unitary(dim, rng);
    let v = haar_unitary(dim, rng);
    let s: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..=1.0)).collect();
    u * linalg::real_diagonal(&s) * v
}

/// Rank-one PVM in a Haar-random basis.
pub fn random_rank_one_pvm(dim: usize, rng: &mut impl Rng) -> Pvm {
    Pvm::from_unitary_columns(&haar_unitary(dim, rng)).expect("Haar unitary")
}
