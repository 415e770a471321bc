//! The rank-one PVM `M^n ≥ E^n × E(σ^{⊗n})` and the spectral diagnostics
//! built on its outcome statistics.

use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::linalg::{self, CMat};
use crate::numerics;
use crate::operator_algebra::{
    cross_log_trace, measure, pvm_product, refines, relative_log_variance, spectral, tensor_power, DensityOperator,
    Pvm, SUPPORT_EPS,
};
use crate::schur_weyl::IrreducibleDecomposition;

const MODULE: &str = "measurement_design";

/// Outcomes whose σ-mass falls below this are pooled into the `+∞` bucket.
pub const ZERO_MASS: f64 = 1e-300;
/// Relative gap used to resolve the eigenspaces of `σ^{⊗n}`.
pub const SIGMA_DEGENERACY_TOL: f64 = 1e-9;
pub const COMMUTATION_TOL: f64 = 1e-8;

/// Rank-one refinement of `E^n × E(σ^{⊗n})` together with its outcome statistics.
#[derive(Debug, Clone)]
pub struct DesignedMeasurement {
    pub n: usize,
    pub m: Pvm,
    /// The joint blocks `E^n_i ∧ (σ^{⊗n}-eigenspace)` that `m` refines.
    pub joint_blocks: Pvm,
    /// `-(1/n) log P_σ(i)`.
    pub sigma_loglik: Vec<f64>,
    pub rho_probs: Vec<f64>,
    pub sigma_probs: Vec<f64>,
}

/// Values of an outcome statistic with their masses under both hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub values: Vec<f64>,
    pub p_mass: Vec<f64>,
    pub q_mass: Vec<f64>,
}

impl SpectrumSample {
    /// `Σ p_i v_i` over finite values.
    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.p_mass).filter(|(v, _)| v.is_finite()).map(|(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values
            .iter()
            .zip(&self.p_mass)
            .filter(|(v, _)| v.is_finite())
            .map(|(v, p)| p * (v - mean).powi(2))
            .sum()
    }

    /// `P{value > a}` under the first distribution.
    pub fn p_tail_above(&self, a: f64) -> f64 {
        self.values.iter().zip(&self.p_mass).filter(|(v, _)| **v > a).map(|(_, p)| p).sum()
    }
}

fn check_faithful(sigma: &DensityOperator, op: &'static str) -> Result<()> {
    let min_eig = sigma.operator().min_eigenvalue()?;
    if min_eig <= SUPPORT_EPS {
        return Err(Error::new(MODULE, op, ErrorKind::SingularState { min_eig }));
    }
    Ok(())
}

/// Probability of each rank-one element, computed from `X W` so the state is multiplied once.
fn rank_one_probabilities(stacked: &CMat, state: &CMat) -> Vec<f64> {
    let xw = state * stacked;
    (0..stacked.ncols()).map(|j| stacked.column(j).dotc(&xw.column(j)).re.max(0.0)).collect()
}

fn loglik(q: &[f64], n: usize) -> Vec<f64> {
    q.iter().map(|&v| if v < ZERO_MASS { f64::INFINITY } else { -v.ln() / n as f64 }).collect()
}

/// Builds `M^n`: joint blocks of `E^n` and the spectral PVM of `σ^{⊗n}`, each split
/// along the eigenbasis of `ρ^{⊗n}` compressed to the block.
pub fn design_measurement(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    decomp: &IrreducibleDecomposition,
) -> Result<DesignedMeasurement> {
    let op = "design_measurement";
    if rho.dim() != sigma.dim() || rho.dim() != decomp.k {
        return Err(Error::new(
            MODULE,
            op,
            ErrorKind::DimensionMismatch { expected: decomp.k, found: if rho.dim() != decomp.k { rho.dim() } else { sigma.dim() } },
        ));
    }
    check_faithful(sigma, op)?;
    let n = decomp.n;
    let rho_n = tensor_power(rho, n)?;
    let sigma_n = tensor_power(sigma, n)?;
    let sigma_spectral = spectral(sigma_n.operator(), SIGMA_DEGENERACY_TOL)?;
    let joint_blocks = pvm_product(&decomp.blocks, &sigma_spectral.projectors)
        .map_err(|e| Error::new(MODULE, op, e.kind))?;

    let mut bases = Vec::with_capacity(rho.dim().pow(n as u32));
    let mut labels = Vec::with_capacity(bases.capacity());
    for (b, label) in joint_blocks.bases().iter().zip(joint_blocks.labels()) {
        if b.ncols() == 1 {
            bases.push(b.clone());
            labels.push(format!("{label}#0"));
            continue;
        }
        let compressed = b.adjoint() * rho_n.matrix() * b;
        let inner = linalg::eigh(&compressed)?;
        let rotated = b * &inner.vectors;
        for t in 0..rotated.ncols() {
            bases.push(rotated.columns(t, 1).into_owned());
            labels.push(format!("{label}#{t}"));
        }
    }
    let m = Pvm::from_bases_unchecked(bases, labels)?;
    let stacked = m.stacked();
    let rho_probs = rank_one_probabilities(&stacked, rho_n.matrix());
    let sigma_probs = rank_one_probabilities(&stacked, sigma_n.matrix());
    Ok(DesignedMeasurement { n, sigma_loglik: loglik(&sigma_probs, n), m, joint_blocks, rho_probs, sigma_probs })
}

/// `-(1/n) log P_σ^M(i)` with masses `P_ρ^M(i)`, `P_σ^M(i)`; zero-σ-mass outcomes pooled at `+∞`.
pub fn sigma_spectrum_under_rho(
    dm: &DesignedMeasurement,
    rho_n: &DensityOperator,
    sigma_n: &DensityOperator,
    n: usize,
) -> Result<SpectrumSample> {
    let p = measure(rho_n, &dm.m).map_err(|e| Error::new(MODULE, "sigma_spectrum_under_rho", e.kind))?;
    let q = measure(sigma_n, &dm.m).map_err(|e| Error::new(MODULE, "sigma_spectrum_under_rho", e.kind))?;
    Ok(pool_infinite(loglik(&q.probabilities, n), p.probabilities, q.probabilities))
}

/// Merges every `+∞` value into one trailing bucket.
pub(crate) fn pool_infinite(values: Vec<f64>, p: Vec<f64>, q: Vec<f64>) -> SpectrumSample {
    let mut out = SpectrumSample { values: Vec::new(), p_mass: Vec::new(), q_mass: Vec::new() };
    let (mut pinf, mut qinf, mut any) = (0.0, 0.0, false);
    for ((v, pi), qi) in values.into_iter().zip(p).zip(q) {
        if v == f64::INFINITY {
            pinf += pi;
            qinf += qi;
            any = true;
        } else {
            out.values.push(v);
            out.p_mass.push(pi);
            out.q_mass.push(qi);
        }
    }
    if any {
        out.values.push(f64::INFINITY);
        out.p_mass.push(pinf);
        out.q_mass.push(qinf);
    }
    out
}

/// Largest `‖σ^{⊗n} v − (v†σ^{⊗n}v) v‖` over the rank-one elements.
fn eigenvector_defect(m: &Pvm, sigma_n: &CMat) -> f64 {
    let w = m.stacked();
    let sw = sigma_n * &w;
    (0..w.ncols())
        .map(|j| {
            let v = w.column(j);
            let lambda = v.dotc(&sw.column(j));
            (sw.column(j) - v * lambda).norm()
        })
        .fold(0.0, f64::max)
}

/// `|Σ_i P_ρ(i)((1/n) log P_σ(i) − Tr ρ log σ)² − (1/n) Var_ρ(log σ)|`.
pub fn variance_identity_gap(dm: &DesignedMeasurement, rho: &DensityOperator, sigma: &DensityOperator, n: usize) -> Result<f64> {
    let op = "variance_identity_gap";
    let not_applicable = |why: String| Error::new(MODULE, op, ErrorKind::IdentityNotApplicable(why));
    if n != dm.n || n == 0 {
        return Err(not_applicable(format!("measurement built for n = {}, asked for n = {n}", dm.n)));
    }
    if !dm.m.is_rank_one() {
        return Err(not_applicable("measurement is not rank one".into()));
    }
    if !refines(&dm.m, &dm.joint_blocks) {
        return Err(not_applicable("measurement does not refine its joint blocks".into()));
    }
    check_faithful(sigma, op)?;
    let sigma_n = tensor_power(sigma, n)?;
    let defect = eigenvector_defect(&dm.m, sigma_n.matrix());
    if defect > COMMUTATION_TOL {
        return Err(not_applicable(format!("measurement does not commute with the tensor power of sigma ({defect:.3e})")));
    }
    let rho_n = tensor_power(rho, n)?;
    let p = measure(&rho_n, &dm.m).map_err(|e| Error::new(MODULE, op, e.kind))?.probabilities;
    let q = measure(&sigma_n, &dm.m).map_err(|e| Error::new(MODULE, op, e.kind))?.probabilities;
    let center = cross_log_trace(rho, sigma)?;
    let lhs: f64 = p.iter().zip(&q).map(|(pi, qi)| pi * (qi.ln() / n as f64 - center).powi(2)).sum();
    let rhs = relative_log_variance(rho, sigma)? / n as f64;
    Ok((lhs - rhs).abs())
}

/// `sup_{t∈[0,1]} a t − (1/n) log Σ_i P_ρ(i) P_σ(i)^{−t}`.
///
/// Certifies `P_ρ{−(1/n) log P_σ > a} ≤ exp(−n·value)`.
pub fn chernoff_markov_bound(dm: &DesignedMeasurement, rho_n: &DensityOperator, n: usize, a: f64) -> Result<f64> {
    let p = measure(rho_n, &dm.m).map_err(|e| Error::new(MODULE, "chernoff_markov_bound", e.kind))?.probabilities;
    Ok(chernoff_markov_scalar(&p, &dm.sigma_probs, n, a))
}

/// The same bound for explicit outcome masses.
pub fn chernoff_markov_scalar(p: &[f64], q: &[f64], n: usize, a: f64) -> f64 {
    if p.iter().zip(q).any(|(&pi, &qi)| pi > 0.0 && qi < ZERO_MASS) {
        // Σ p q^{-t} diverges for every t > 0.
        return 0.0;
    }
    if a == f64::NEG_INFINITY {
        return 0.0;
    }
    let logs: Vec<(f64, f64)> = p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| (pi.ln(), qi.ln())).collect();
    let nf = n as f64;
    let objective = |t: f64| a * t - numerics::log_sum_exp(logs.iter().map(|(lp, lq)| lp - t * lq)) / nf;
    let (_, value) = numerics::golden_section_max(objective, 0.0, 1.0, 1e-10);
    value.max(0.0)
}

/// `Tr ρ σ^{−t}`.
pub fn tr_rho_sigma_negpower(rho: &DensityOperator, sigma: &DensityOperator, t: f64) -> Result<f64> {
    let op = "tr_rho_sigma_negpower";
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::new(MODULE, op, ErrorKind::InvalidParameter(format!("t must lie in [0, 1], got {t}"))));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::new(MODULE, op, ErrorKind::DimensionMismatch { expected: sigma.dim(), found: rho.dim() }));
    }
    check_faithful(sigma, op)?;
    if t == 0.0 {
        return Ok(rho.operator().trace());
    }
    let e = sigma.eigh()?;
    let rotated = e.vectors.adjoint() * rho.matrix() * &e.vectors;
    Ok(e.values.iter().enumerate().map(|(i, v)| rotated[(i, i)].re * v.powf(-t)).sum())
}

/// JSON view emitted by the `design` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub n: usize,
    pub k: usize,
    pub block_dims: Vec<usize>,
    pub joint_block_dims: Vec<usize>,
    pub outcomes: usize,
    pub spectrum: SpectrumSample,
    /// `None` when the identity does not apply to this measurement.
    pub variance_identity_gap: Option<f64>,
    pub chernoff: Vec<ChernoffPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChernoffPoint {
    pub a: f64,
    pub bound: f64,
    pub tail: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::{pinch, relative_entropy};
    use crate::random;
    use crate::schur_weyl::irreducible_decomposition;
    use nalgebra::DMatrix;

    fn rotation(theta: f64) -> CMat {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|v| linalg::c(v, 0.0))
    }

    fn rotated_diag(p: &[f64], theta: f64) -> DensityOperator {
        DensityOperator::diagonal(p).unwrap().conjugated(&rotation(theta))
    }

    fn design(rho: &DensityOperator, sigma: &DensityOperator, n: usize) -> DesignedMeasurement {
        let d = irreducible_decomposition(n, rho.dim(), 7).unwrap();
        design_measurement(rho, sigma, &d).unwrap()
    }

    #[test]
    fn single_copy_diagonal_gives_computational_basis() {
        let s = DensityOperator::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let dm = design(&s, &s, 1);
        assert!(dm.m.is_rank_one() && dm.m.len() == 3);
        let mut pairs: Vec<(f64, f64)> = dm.sigma_probs.iter().copied().zip(dm.sigma_loglik.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for ((q, v), want) in pairs.iter().zip([0.2, 0.3, 0.5]) {
            assert!((q - want).abs() < 1e-12);
            assert!((v + f64::ln(want)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_explicit_construction() {
        let sigma = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let plus = linalg::CVec::from_vec(vec![linalg::c(0.5f64.sqrt(), 0.0), linalg::c(0.5f64.sqrt(), 0.0)]);
        let rho = DensityOperator::pure(&plus).unwrap();
        let dm = design(&rho, &sigma, 2);
        assert_eq!(dm.m.len(), 4);
        // Oracle: |00⟩, |11⟩, (|01⟩ ± |10⟩)/√2 with masses (1/4, 1/4, 1/2, 0) and (1/16, 9/16, 3/16, 3/16).
        let mut got: Vec<(f64, f64)> = dm.rho_probs.iter().copied().zip(dm.sigma_probs.iter().copied()).collect();
        got.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        let want = [(0.0, 3.0 / 16.0), (0.25, 1.0 / 16.0), (0.25, 9.0 / 16.0), (0.5, 3.0 / 16.0)];
        for (g, w) in got.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-12 && (g.1 - w.1).abs() < 1e-12, "{got:?}");
        }
        assert!(refines(&dm.m, &dm.joint_blocks));
    }

    #[test]
    fn invariants_on_random_pairs() {
        let mut rng = random::labeled_rng(3, "design");
        for (k, n) in [(2, 3), (2, 5), (3, 3)] {
            let d = irreducible_decomposition(n, k, 1).unwrap();
            let rho = random::random_density(k, &mut rng);
            let sigma = random::random_faithful_density(k, 0.05, &mut rng);
            let dm = design_measurement(&rho, &sigma, &d).unwrap();
            assert!(dm.m.is_rank_one());
            assert!(refines(&dm.m, &d.blocks));
            let sigma_n = tensor_power(&sigma, n).unwrap();
            assert!(dm.m.max_commutator_norm(sigma_n.operator()) <= 1e-8);
            let pinched = pinch(&dm.m, sigma_n.operator()).unwrap();
            assert!(pinched.max_abs_diff(sigma_n.operator()) <= 1e-9);
            assert!((dm.rho_probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((dm.sigma_probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_sigma_is_rejected() {
        let d = irreducible_decomposition(2, 2, 1).unwrap();
        let s = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let err = design_measurement(&s, &s, &d).unwrap_err();
        assert!(matches!(err.kind, ErrorKind::SingularState { .. }));
        assert_eq!(err.module, MODULE);
    }

    #[test]
    fn spectrum_examples() {
        let s = rotated_diag(&[0.4, 0.6], 0.3);
        let dm = design(&s, &s, 3);
        let s3 = tensor_power(&s, 3).unwrap();
        let sample = sigma_spectrum_under_rho(&dm, &s3, &s3, 3).unwrap();
        assert!(sample.mean() >= 0.0);
        assert!((sample.p_mass.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let rho = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let sigma = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let dm = design(&rho, &sigma, 1);
        let sample = sigma_spectrum_under_rho(&dm, &rho, &sigma, 1).unwrap();
        for ((v, p), q) in sample.values.iter().zip(&sample.p_mass).zip(&sample.q_mass) {
            let (want_p, want_q) = if (q - 0.25).abs() < 1e-12 { (0.3, 0.25) } else { (0.7, 0.75) };
            assert!((p - want_p).abs() < 1e-12 && (v + f64::ln(want_q)).abs() < 1e-12);
        }

        let rho = rotated_diag(&[0.3, 0.7], 0.5);
        let dm = design(&rho, &sigma, 4);
        let sample = sigma_spectrum_under_rho(&dm, &tensor_power(&rho, 4).unwrap(), &tensor_power(&sigma, 4).unwrap(), 4).unwrap();
        let target = -cross_log_trace(&rho, &sigma).unwrap();
        assert!((sample.mean() - target).abs() <= 3.0 * sample.variance().sqrt() + 1e-12);
    }

    #[test]
    fn zero_sigma_mass_is_pooled() {
        let s = pool_infinite(vec![1.0, f64::INFINITY, 2.0, f64::INFINITY], vec![0.1, 0.2, 0.3, 0.4], vec![0.5, 0.0, 0.5, 0.0]);
        assert_eq!(s.values, vec![1.0, 2.0, f64::INFINITY]);
        assert!((s.p_mass[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn variance_identity_examples() {
        let s = rotated_diag(&[0.35, 0.65], 0.4);
        for n in 1..=4 {
            assert!(variance_identity_gap(&design(&s, &s, n), &s, &s, n).unwrap() <= 1e-10);
        }
        // Two-point oracle on a commuting pair: both sides equal p(1-p)(ln(s0/s1))²/n.
        let rho = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let sigma = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let dm = design(&rho, &sigma, 3);
        assert!(variance_identity_gap(&dm, &rho, &sigma, 3).unwrap() <= 1e-10);
        let want = 0.3 * 0.7 * 3f64.ln().powi(2) / 3.0;
        assert!((relative_log_variance(&rho, &sigma).unwrap() / 3.0 - want).abs() < 1e-12);

        let rho = rotated_diag(&[0.8, 0.2], 0.6);
        for n in 2..=6 {
            let dm = design(&rho, &sigma, n);
            assert!(variance_identity_gap(&dm, &rho, &sigma, n).unwrap() <= 1e-9, "n = {n}");
        }
    }

    #[test]
    fn variance_identity_rejects_invalid_measurements() {
        let rho = rotated_diag(&[0.8, 0.2], 0.6);
        let sigma = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let mut dm = design(&rho, &sigma, 2);
        // A rank-one basis that does not commute with σ⊗σ.
        let mut rng = random::labeled_rng(5, "bad");
        dm.m = random::random_rank_one_pvm(4, &mut rng);
        dm.joint_blocks = Pvm::trivial(4);
        let err = variance_identity_gap(&dm, &rho, &sigma, 2).unwrap_err();
        assert!(matches!(err.kind, ErrorKind::IdentityNotApplicable(_)));
        dm.m = Pvm::trivial(4);
        assert!(variance_identity_gap(&dm, &rho, &sigma, 2).is_err());
    }

    #[test]
    fn variance_identity_random_pairs() {
        let mut rng = random::labeled_rng(8, "vi");
        for (k, n_max) in [(2, 6), (3, 4)] {
            for n in 1..=n_max {
                let d = irreducible_decomposition(n, k, 2).unwrap();
                for _ in 0..3 {
                    let rho = random::random_density(k, &mut rng);
                    let sigma = random::random_faithful_density(k, 0.05, &mut rng);
                    let dm = design_measurement(&rho, &sigma, &d).unwrap();
                    assert!(variance_identity_gap(&dm, &rho, &sigma, n).unwrap() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn chernoff_examples() {
        let rho = rotated_diag(&[0.8, 0.2], 0.6);
        let sigma = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        assert!(relative_entropy(&rho, &sigma).unwrap().is_finite());
        let n = 4;
        let dm = design(&rho, &sigma, n);
        let rho_n = tensor_power(&rho, n).unwrap();
        let a = -cross_log_trace(&rho, &sigma).unwrap() + 0.1;
        assert!(chernoff_markov_bound(&dm, &rho_n, n, a).unwrap() > 0.0);
        assert_eq!(chernoff_markov_bound(&dm, &rho_n, n, f64::NEG_INFINITY).unwrap(), 0.0);
        assert_eq!(chernoff_markov_bound(&dm, &rho_n, n, -1e6).unwrap(), 0.0);
    }

    #[test]
    fn chernoff_bound_dominates_tail() {
        let mut rng = random::labeled_rng(12, "tail");
        for trial in 0..20 {
            let n = 2 + trial % 4;
            let rho = random::random_density(2, &mut rng);
            let sigma = random::random_faithful_density(2, 0.05, &mut rng);
            let dm = design(&rho, &sigma, n);
            let rho_n = tensor_power(&rho, n).unwrap();
            let sample = sigma_spectrum_under_rho(&dm, &rho_n, &tensor_power(&sigma, n).unwrap(), n).unwrap();
            let center = -cross_log_trace(&rho, &sigma).unwrap();
            let a = center + rand::Rng::random_range(&mut rng, -0.2..0.8);
            let bound = chernoff_markov_bound(&dm, &rho_n, n, a).unwrap();
            assert!(sample.p_tail_above(a) <= (-(n as f64) * bound).exp() + 1e-12);
        }
    }

    #[test]
    fn negpower_examples() {
        let half = DensityOperator::maximally_mixed(2);
        assert!((tr_rho_sigma_negpower(&half, &half, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((tr_rho_sigma_negpower(&half, &half, 1.0).unwrap() - 2.0).abs() < 1e-12);
        let rho = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let sigma = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let want = 0.3 * 2.0 + 0.7 * 2.0 / 3f64.sqrt();
        assert!((tr_rho_sigma_negpower(&rho, &sigma, 0.5).unwrap() - want).abs() < 1e-12);
        assert!((want - 1.40829).abs() < 1e-5);
        let singular = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert!(tr_rho_sigma_negpower(&rho, &singular, 0.5).is_err());
    }

    #[test]
    fn spectrum_variance_shrinks_with_n() {
        let rho = rotated_diag(&[0.8, 0.2], 0.6);
        let sigma = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        let mut previous = f64::INFINITY;
        for n in [2, 4, 6, 8] {
            let dm = design(&rho, &sigma, n);
            let sample =
                sigma_spectrum_under_rho(&dm, &tensor_power(&rho, n).unwrap(), &tensor_power(&sigma, n).unwrap(), n).unwrap();
            let v = sample.variance();
            assert!(v <= previous * 1.05, "n = {n}: {v} after {previous}");
            previous = v;
        }
    }
}
