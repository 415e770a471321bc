//! Entropy-type operator inequalities used by the achievability argument,
//! each with a checker and a randomized stress suite.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::linalg::{self, CMat};
use crate::numerics;
use crate::operator_algebra::{
    matrix_log, matrix_neg_power, pinch, refines, DensityOperator, HermitianOperator, MatrixJson, Pvm, SupportMode,
    SUPPORT_EPS,
};
use crate::random::{self, StreamRng};

const MODULE: &str = "inequalities";

pub const COMMUTATION_TOL: f64 = 1e-9;
pub const LEMMA2_TOL: f64 = 1e-9;
pub const C1_TOL: f64 = 1e-10;
pub const C2_TOL: f64 = 1e-8;
pub const C2_T_GRID: [f64; 3] = [0.25, 0.5, 1.0];

fn x_log2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln().powi(2)
    }
}

/// `max Σ_i p_i (ln p_i)²` over the `k`-point simplex, in closed form.
pub fn plog2_max(k: usize) -> Result<f64> {
    match k {
        0 | 1 => Err(Error::new(MODULE, "plog2_max", ErrorKind::InvalidParameter(format!("k must be at least 2, got {k}")))),
        2 => {
            let root = (1.0 - 4.0 / std::f64::consts::E.powi(2)).sqrt();
            Ok(x_log2((1.0 - root) / 2.0) + x_log2((1.0 + root) / 2.0))
        }
        _ => Ok((k as f64).ln().powi(2)),
    }
}

/// Maximizer found by [`plog2_max_oracle_detail`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plog2Optimum {
    pub value: f64,
    /// Number of nonzero coordinates.
    pub support: usize,
    /// Coordinates at the larger level.
    pub r: usize,
    pub high: f64,
    pub low: f64,
    /// All `k` coordinates are positive.
    pub interior: bool,
}

/// Brute-force scan of two-level points: on each face of the simplex with
/// `s` nonzero coordinates, `r` of them at value `a` and `s − r` at
/// `(1 − r a)/(s − r)`. `a` is scanned on a grid of `grid` points and then
/// refined by golden-section search.
pub fn plog2_max_oracle_detail(k: usize, grid: usize) -> Result<Plog2Optimum> {
    if !(2..=4).contains(&k) || grid < 1000 {
        return Err(Error::new(
            MODULE,
            "plog2_max_oracle",
            ErrorKind::InvalidParameter(format!("oracle needs k in 2..=4 and grid >= 1000, got k={k}, grid={grid}")),
        ));
    }
    let mut best = Plog2Optimum { value: f64::NEG_INFINITY, support: 0, r: 0, high: 0.0, low: 0.0, interior: false };
    for s in 1..=k {
        let uniform = 1.0 / s as f64;
        let value = s as f64 * x_log2(uniform);
        if value > best.value {
            best = Plog2Optimum { value, support: s, r: s, high: uniform, low: uniform, interior: s == k };
        }
        for r in 1..s {
            let (rf, rest) = (r as f64, (s - r) as f64);
            let f = |a: f64| rf * x_log2(a) + rest * x_log2((1.0 - rf * a) / rest);
            let top = 1.0 / rf;
            let step = top / grid as f64;
            let (mut arg, mut val) = (0.0, f64::NEG_INFINITY);
            for i in 0..=grid {
                let a = i as f64 * step;
                let v = f(a);
                if v > val {
                    arg = a;
                    val = v;
                }
            }
            let (a, v) = numerics::golden_section_max(f, (arg - step).max(0.0), (arg + step).min(top), 1e-14);
            if v > best.value {
                let b = (1.0 - rf * a) / rest;
                best = Plog2Optimum {
                    value: v,
                    support: s,
                    r,
                    high: a.max(b),
                    low: a.min(b),
                    interior: s == k && a > 0.0 && b > 0.0,
                };
            }
        }
    }
    Ok(best)
}

pub fn plog2_max_oracle(k: usize, grid: usize) -> Result<f64> {
    Ok(plog2_max_oracle_detail(k, grid)?.value)
}

fn precondition(op: &'static str, why: String) -> Error {
    Error::new(MODULE, op, ErrorKind::Precondition(why))
}

fn check_dim(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::new(MODULE, op, ErrorKind::DimensionMismatch { expected, found }));
    }
    Ok(())
}

fn pinched_state(m: &Pvm, rho: &DensityOperator) -> Result<DensityOperator> {
    Ok(DensityOperator::from_operator_unchecked(pinch(m, rho.operator())?))
}

/// `Tr ρ(log ρ − log 𝓔_M(ρ))²` against `4(log w(E))²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Check {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn check_lemma2(rho: &DensityOperator, e: &Pvm, m: &Pvm) -> Result<Lemma2Check> {
    let op = "check_lemma2";
    check_dim(op, e.dim(), rho.dim())?;
    check_dim(op, m.dim(), rho.dim())?;
    if !refines(m, e) {
        return Err(precondition(op, "m does not refine e".into()));
    }
    let comm = e.max_commutator_norm(rho.operator());
    if comm > COMMUTATION_TOL {
        return Err(precondition(op, format!("rho does not commute with e (commutator {comm:.3e})")));
    }
    let w = e.max_rank();
    if w < 3 {
        return Err(precondition(op, format!("w(e) = {w}, need at least 3")));
    }
    let log_rho = matrix_log(rho, SupportMode::Restricted)?;
    let log_pinched = matrix_log(&pinched_state(m, rho)?, SupportMode::Restricted)?;
    let x = log_rho.matrix() - log_pinched.matrix();
    let lhs = linalg::trace_product(rho.matrix(), &(&x * &x));
    let rhs = 4.0 * (w as f64).ln().powi(2);
    Ok(Lemma2Check { lhs, rhs, ok: lhs <= rhs + LEMMA2_TOL })
}

/// `λ_min(k·𝓔_M(ρ) − ρ)`; nonnegative in exact arithmetic.
pub fn check_lemma_c1(rho: &DensityOperator, m: &Pvm) -> Result<f64> {
    check_dim("check_lemma_c1", m.dim(), rho.dim())?;
    let pinched = pinch(m, rho.operator())?;
    let diff = pinched.matrix().scale(rho.dim() as f64) - rho.matrix();
    HermitianOperator::from_matrix_unchecked(diff).min_eigenvalue()
}

/// `λ_min(w(E)^t ρ^{−t} − 𝓔_M(ρ)^{−t})`; nonnegative in exact arithmetic.
pub fn check_lemma_c2(rho: &DensityOperator, e: &Pvm, m: &Pvm, t: f64) -> Result<f64> {
    let op = "check_lemma_c2";
    check_dim(op, e.dim(), rho.dim())?;
    check_dim(op, m.dim(), rho.dim())?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(precondition(op, format!("t must lie in (0, 1], got {t}")));
    }
    let min_eig = rho.operator().min_eigenvalue()?;
    if min_eig <= SUPPORT_EPS {
        return Err(precondition(op, format!("rho is not strictly positive (min eigenvalue {min_eig:.3e})")));
    }
    let comm = e.max_commutator_norm(rho.operator());
    if comm > COMMUTATION_TOL {
        return Err(precondition(op, format!("rho does not commute with e (commutator {comm:.3e})")));
    }
    if !refines(m, e) {
        return Err(precondition(op, "m does not refine e".into()));
    }
    let w = e.max_rank() as f64;
    let left = matrix_neg_power(rho, t)?;
    let right = matrix_neg_power(&pinched_state(m, rho)?, t)?;
    let diff = left.matrix().scale(w.powf(t)) - right.matrix();
    HermitianOperator::from_matrix_unchecked(diff).min_eigenvalue()
}

/// Random instance with a block PVM `e`, a state commuting with it and a
/// random rank-one refinement `m`.
#[derive(Debug, Clone)]
pub struct BlockInstance {
    pub rho: DensityOperator,
    pub e: Pvm,
    pub m: Pvm,
}

/// `ranks` must sum to the dimension. Each block gets its own random state,
/// weighted by a Dirichlet draw; `faithful` keeps every block state full rank.
pub fn random_block_instance(ranks: &[usize], faithful: bool, rng: &mut StreamRng) -> BlockInstance {
    let dim: usize = ranks.iter().sum();
    let u = random::haar_unitary(dim, rng);
    let weights = random::dirichlet_spectrum(ranks.len(), rng);
    let mut rho = CMat::zeros(dim, dim);
    let mut e_bases = Vec::new();
    let mut m_bases = Vec::new();
    let mut offset = 0;
    for (&r, &a) in ranks.iter().zip(&weights) {
        let v = u.columns(offset, r).into_owned();
        offset += r;
        let local = match (faithful, rng.random_range(0..3)) {
            (true, _) | (false, 0) => random::random_faithful_density(r, 0.02, rng),
            (false, 1) => random::random_pure(r, rng),
            _ => random::random_density(r, rng),
        };
        let a = if faithful { 0.5 / ranks.len() as f64 + 0.5 * a } else { a };
        rho += &v * local.matrix().scale(a) * v.adjoint();
        let refine = random::haar_unitary(r, rng);
        let rotated = &v * refine;
        for j in 0..r {
            m_bases.push(rotated.columns(j, 1).into_owned());
        }
        e_bases.push(v);
    }
    let trace = rho.trace().re;
    rho /= linalg::c(trace, 0.0);
    let e_labels = (0..e_bases.len()).map(|i| format!("E{i}")).collect();
    let m_labels = (0..m_bases.len()).map(|i| format!("M{i}")).collect();
    BlockInstance {
        rho: DensityOperator::from_matrix(rho).expect("convex combination of states"),
        e: Pvm::from_bases(e_bases, e_labels).expect("columns of a unitary"),
        m: Pvm::from_bases(m_bases, m_labels).expect("columns of a unitary"),
    }
}

/// Matrices of a violating trial.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub value: f64,
    pub t: Option<f64>,
    pub rho: MatrixJson,
    /// Columns are the rank-one elements of `m`.
    pub m_basis: MatrixJson,
    pub e_ranks: Vec<usize>,
}

/// Outcome of a stress suite. `extremal` is the smallest slack seen
/// (`rhs − lhs` for the entropy bound, `λ_min` for the operator inequalities).
#[derive(Debug, Clone, Serialize)]
pub struct StressReport {
    pub name: String,
    pub trials: usize,
    pub checks: usize,
    pub violations: usize,
    pub extremal: f64,
    pub tolerance: f64,
    pub witnesses: Vec<Witness>,
}

impl StressReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct TrialResult {
    checks: usize,
    slack: f64,
    witnesses: Vec<Witness>,
}

fn witness(trial: usize, value: f64, t: Option<f64>, inst: &BlockInstance) -> Witness {
    Witness {
        trial,
        value,
        t,
        rho: inst.rho.operator().to_json(),
        m_basis: MatrixJson::from_matrix(&inst.m.stacked()),
        e_ranks: inst.e.ranks(),
    }
}

fn run_suite(
    name: &str,
    trials: usize,
    tolerance: f64,
    seed: u64,
    trial: impl Fn(usize, &mut StreamRng) -> Result<TrialResult> + Sync,
) -> Result<StressReport> {
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::labeled_rng(seed, &format!("{MODULE}/{name}/{i}"));
            trial(i, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = StressReport {
        name: name.to_string(),
        trials,
        checks: 0,
        violations: 0,
        extremal: f64::INFINITY,
        tolerance,
        witnesses: Vec::new(),
    };
    for r in results {
        report.checks += r.checks;
        report.extremal = report.extremal.min(r.slack);
        report.violations += r.witnesses.len();
        report.witnesses.extend(r.witnesses);
    }
    Ok(report)
}

/// Ranks for a random block PVM on `dim` with at least one block of rank `≥ min_w`.
fn random_ranks(dim: usize, min_w: usize, rng: &mut StreamRng) -> Vec<usize> {
    let first = rng.random_range(min_w.min(dim)..=dim);
    let mut ranks = vec![first];
    let mut left = dim - first;
    while left > 0 {
        let r = rng.random_range(1..=left);
        ranks.push(r);
        left -= r;
    }
    ranks
}

/// Entropy bound on random instances, dimensions 3–5.
pub fn stress_lemma2(trials: usize, seed: u64) -> Result<StressReport> {
    run_suite("lemma2", trials, LEMMA2_TOL, seed, |i, rng| {
        let dim = rng.random_range(3..=5);
        let ranks = if i % 4 == 0 { vec![dim] } else { random_ranks(dim, 3, rng) };
        let inst = random_block_instance(&ranks, false, rng);
        let check = check_lemma2(&inst.rho, &inst.e, &inst.m)?;
        let witnesses = if check.ok { vec![] } else { vec![witness(i, check.lhs, None, &inst)] };
        Ok(TrialResult { checks: 1, slack: check.rhs - check.lhs, witnesses })
    })
}

/// `ρ ≤ k 𝓔_M(ρ)` on random states and rank-one PVMs, dimensions 2–6. Every
/// fourth state is pure, where the inequality is tight.
pub fn stress_lemma_c1(trials: usize, seed: u64) -> Result<StressReport> {
    run_suite("c1", trials, C1_TOL, seed, |i, rng| {
        let dim = rng.random_range(2..=6);
        let ranks: Vec<usize> = if i % 3 == 2 { random_ranks(dim, 1, rng) } else { vec![dim] };
        let mut inst = random_block_instance(&ranks, false, rng);
        inst.rho = match i % 4 {
            0 => random::random_pure(dim, rng),
            1 => random::random_rank_deficient(dim, rng.random_range(1..=dim), rng),
            _ => random::random_density(dim, rng),
        };
        let min_eig = check_lemma_c1(&inst.rho, &inst.m)?;
        let witnesses = if min_eig < -C1_TOL { vec![witness(i, min_eig, None, &inst)] } else { vec![] };
        Ok(TrialResult { checks: 1, slack: min_eig, witnesses })
    })
}

/// Inverse-power inequality on faithful states, every `t` of [`C2_T_GRID`] per trial.
pub fn stress_lemma_c2(trials: usize, seed: u64) -> Result<StressReport> {
    run_suite("c2", trials, C2_TOL, seed, |i, rng| {
        let ranks = if i % 2 == 0 { vec![3] } else { random_ranks(rng.random_range(2..=5), 1, rng) };
        let inst = random_block_instance(&ranks, true, rng);
        let mut slack = f64::INFINITY;
        let mut witnesses = Vec::new();
        for &t in &C2_T_GRID {
            let v = check_lemma_c2(&inst.rho, &inst.e, &inst.m, t)?;
            slack = slack.min(v);
            if v < -C2_TOL {
                witnesses.push(witness(i, v, Some(t), &inst));
            }
        }
        Ok(TrialResult { checks: C2_T_GRID.len(), slack, witnesses })
    })
}
