//! Classical hypothesis testing for arbitrary finite distribution pairs:
//! likelihood-ratio threshold tests, randomized Neyman–Pearson optima and
//! finite-n views of the log-likelihood-ratio distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorKind, Result};
use crate::numerics;

const MODULE: &str = "info_spectrum";

pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Relative rounding slack when checking `β ≤ e^{−nλ}`.
pub const BOUND_SLACK: f64 = 1e-12;
/// Log-ratios closer than this are one likelihood-ratio level.
pub const TIE_TOL: f64 = 1e-12;
pub const GRID_POINTS: usize = 201;
pub const QUANTILE_DELTAS: [f64; 2] = [0.01, 0.05];

/// Distributions `p_n`, `q_n` on a common finite outcome set; `n` normalizes log-ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionPair {
    pub n: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl DistributionPair {
    pub fn new(p: Vec<f64>, q: Vec<f64>, n: usize) -> Result<Self> {
        let pair = DistributionPair { n, p, q };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: String| Error::new(MODULE, "DistributionPair", ErrorKind::InvalidParameter(why));
        if self.n == 0 {
            return Err(bad("n must be positive".into()));
        }
        if self.p.len() != self.q.len() || self.p.is_empty() {
            return Err(Error::new(
                MODULE,
                "DistributionPair",
                ErrorKind::DimensionMismatch { expected: self.p.len(), found: self.q.len() },
            ));
        }
        for (name, d) in [("p", &self.p), ("q", &self.q)] {
            if let Some(v) = d.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(bad(format!("{name} has entry {v}")));
            }
            let total: f64 = d.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(bad(format!("{name} sums to {total}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `(1/n) log(p/q)`, `+∞` where `q = 0 < p`, `NaN` where `p = 0`.
    pub fn log_ratios(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.p
            .iter()
            .zip(&self.q)
            .map(|(&p, &q)| {
                if p == 0.0 {
                    f64::NAN
                } else if q == 0.0 {
                    f64::INFINITY
                } else {
                    (p.ln() - q.ln()) / n
                }
            })
            .collect()
    }

    /// `n` i.i.d. draws of two finite laws, reduced to type classes. Only the
    /// masses and log-ratios of each type are kept, which is all a likelihood
    /// ratio test sees.
    pub fn iid_types(p1: &[f64], q1: &[f64], n: usize) -> Result<Self> {
        if p1.len() != q1.len() || p1.is_empty() {
            return Err(Error::new(
                MODULE,
                "iid_types",
                ErrorKind::DimensionMismatch { expected: p1.len(), found: q1.len() },
            ));
        }
        DistributionPair::new(p1.to_vec(), q1.to_vec(), 1)?;
        let mut p = Vec::new();
        let mut q = Vec::new();
        for counts in compositions(n, p1.len()) {
            let ln_multinomial = numerics::ln_factorial(n as u64)
                - counts.iter().map(|&c| numerics::ln_factorial(c as u64)).sum::<f64>();
            let mass = |d: &[f64]| {
                let mut log = ln_multinomial;
                for (&c, &v) in counts.iter().zip(d) {
                    if c > 0 {
                        if v == 0.0 {
                            return 0.0;
                        }
                        log += c as f64 * v.ln();
                    }
                }
                log.exp()
            };
            p.push(mass(p1));
            q.push(mass(q1));
        }
        // Renormalize away the rounding of the exponentials.
        let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
        p.iter_mut().for_each(|v| *v /= sp);
        q.iter_mut().for_each(|v| *v /= sq);
        DistributionPair::new(p, q, n)
    }
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Acceptance region `S_n(λ) = {ω : (1/n) log p/q ≥ λ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTest {
    pub lambda: f64,
    pub acceptance_mask: Vec<bool>,
}

/// Outcomes with `p = 0` are always rejected and those with `q = 0 < p` always accepted.
pub fn threshold_test(dp: &DistributionPair, lambda: f64) -> ThresholdTest {
    let acceptance_mask = dp.log_ratios().into_iter().map(|r| !r.is_nan() && r >= lambda).collect();
    ThresholdTest { lambda, acceptance_mask }
}

/// `(α, β)`: p-mass rejected, q-mass accepted.
pub fn classical_errors(dp: &DistributionPair, t: &ThresholdTest) -> (f64, f64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    for ((&p, &q), &accept) in dp.p.iter().zip(&dp.q).zip(&t.acceptance_mask) {
        if accept {
            beta += q;
        } else {
            alpha += p;
        }
    }
    (alpha, beta)
}

/// Errors of a randomized test accepting outcome `ω` with probability `weights[ω]`.
pub fn randomized_errors(dp: &DistributionPair, weights: &[f64]) -> (f64, f64) {
    let accept_p: f64 = dp.p.iter().zip(weights).map(|(p, w)| p * w).sum();
    let beta: f64 = dp.q.iter().zip(weights).map(|(q, w)| q * w).sum();
    (1.0 - accept_p, beta)
}

/// Checks `β_n(S_n(λ)) ≤ e^{−nλ}` and returns `(ok, e^{−nλ} − β)`.
pub fn verify_lemma4_bounds(dp: &DistributionPair, lambda: f64) -> (bool, f64) {
    let (_, beta) = classical_errors(dp, &threshold_test(dp, lambda));
    let bound = (-(dp.n as f64) * lambda).exp();
    (beta <= bound * (1.0 + BOUND_SLACK), bound - beta)
}

/// Randomized Neyman–Pearson optimum at level `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalNp {
    pub beta_star: f64,
    pub alpha: f64,
    /// Normalized log-ratio of the last accepted level.
    pub threshold: f64,
    /// Acceptance probability on that level when it is only partly accepted, else 0.
    pub randomization: f64,
    /// Per-outcome acceptance probability.
    pub weights: Vec<f64>,
}

pub fn classical_np(dp: &DistributionPair, epsilon: f64) -> Result<ClassicalNp> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::new(
            MODULE,
            "classical_np",
            ErrorKind::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")),
        ));
    }
    Ok(np_fill(&dp.p, &dp.q, &dp.log_ratios(), epsilon))
}

/// Fills acceptance in decreasing likelihood-ratio order until the accepted
/// p-mass reaches `1 − ε`, randomizing the level that crosses it.
pub(crate) fn np_fill(p: &[f64], q: &[f64], ratios: &[f64], epsilon: f64) -> ClassicalNp {
    let mut order: Vec<usize> = (0..p.len()).filter(|&i| !ratios[i].is_nan() && p[i] > 0.0).collect();
    order.sort_by(|&a, &b| ratios[b].partial_cmp(&ratios[a]).expect("ratios are ordered").then(a.cmp(&b)));
    let mut weights = vec![0.0; p.len()];
    let target = 1.0 - epsilon;
    let mut accepted = 0.0;
    let mut threshold = f64::INFINITY;
    let mut randomization = 0.0;
    let mut start = 0;
    while start < order.len() && accepted < target {
        let level = ratios[order[start]];
        let mut end = start + 1;
        while end < order.len() && same_level(ratios[order[end]], level) {
            end += 1;
        }
        let group = &order[start..end];
        let mass: f64 = group.iter().map(|&i| p[i]).sum();
        let need = target - accepted;
        threshold = level;
        let w = if mass <= need * (1.0 + 1e-13) { 1.0 } else { need / mass };
        for &i in group {
            weights[i] = w;
        }
        if w < 1.0 {
            randomization = w;
            accepted = target;
        } else {
            accepted += mass;
        }
        start = end;
    }
    let (alpha, beta_star) = {
        let acc: f64 = p.iter().zip(&weights).map(|(v, w)| v * w).sum();
        (1.0 - acc, q.iter().zip(&weights).map(|(v, w)| v * w).sum())
    };
    ClassicalNp { beta_star, alpha, threshold, randomization, weights }
}

fn same_level(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= TIE_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Lower and upper quantiles of the normalized log-ratio under `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantilePair {
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Finite-n view of the log-likelihood-ratio law under `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralRecord {
    pub n: usize,
    pub grid: Vec<f64>,
    /// `P_p{(1/n) log p/q ≤ λ}` on `grid`.
    pub cdf: Vec<f64>,
    pub quantiles: Vec<QuantilePair>,
    /// p-mass with `q = 0`.
    pub infinite_mass: f64,
}

pub fn spectral_grid(dp: &DistributionPair) -> Vec<f64> {
    let finite: Vec<f64> = dp.log_ratios().into_iter().filter(|r| r.is_finite()).collect();
    let (lo, hi) = if finite.is_empty() {
        (0.0, 0.0)
    } else {
        (finite.iter().cloned().fold(f64::INFINITY, f64::min), finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    };
    let (lo, hi) = (lo - 0.1, hi + 0.1);
    (0..GRID_POINTS).map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64).collect()
}

fn spectral_record(dp: &DistributionPair) -> SpectralRecord {
    let ratios = dp.log_ratios();
    let mut atoms: Vec<(f64, f64)> =
        ratios.iter().zip(&dp.p).filter(|(r, &p)| !r.is_nan() && p > 0.0).map(|(&r, &p)| (r, p)).collect();
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ratios are ordered"));
    let infinite_mass = atoms.iter().filter(|a| a.0.is_infinite()).fold(0.0, |s, a| s + a.1);
    let grid = spectral_grid(dp);
    let cdf = grid.iter().map(|&l| atoms.iter().filter(|a| a.0 <= l).fold(0.0, |s, a| s + a.1)).collect();
    let quantile = |level: f64| {
        let mut acc = 0.0;
        for &(r, p) in &atoms {
            acc += p;
            if acc >= level * (1.0 - 1e-12) {
                return r;
            }
        }
        atoms.last().map_or(f64::NAN, |a| a.0)
    };
    let quantiles =
        QUANTILE_DELTAS.iter().map(|&delta| QuantilePair { delta, lower: quantile(delta), upper: quantile(1.0 - delta) }).collect();
    SpectralRecord { n: dp.n, grid, cdf, quantiles, infinite_mass }
}

/// One record per pair; the limiting divergence rates are deliberately not estimated.
pub fn spectral_functionals(seq: &[DistributionPair]) -> Result<Vec<SpectralRecord>> {
    use rayon::prelude::*;
    if seq.is_empty() {
        return Err(Error::new(MODULE, "spectral_functionals", ErrorKind::InvalidParameter("empty sequence".into())));
    }
    for dp in seq {
        dp.validate()?;
    }
    Ok(seq.par_iter().map(spectral_record).collect())
}

/// Finite-n stand-ins for the large-deviation exponent functional
/// `sup{ limsup −(1/n) log β_n : α_n eventually below 1 }`, one per reading of
/// "eventually below 1". Both look only at the tail of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DaggerSurrogates {
    /// Admissible when `max α` over the tail stays below 1.
    pub limsup_rule: Option<f64>,
    /// Admissible when `min α` over the tail stays below 1.
    pub liminf_rule: Option<f64>,
}

pub const TAIL_FRACTION: f64 = 0.6;
pub const ALPHA_CEILING: f64 = 1.0 - 1e-9;

/// Tail of a sweep: the largest `ceil(0.6·len)` points.
pub fn tail_start(len: usize) -> usize {
    len - ((TAIL_FRACTION * len as f64).ceil() as usize).clamp(1.min(len), len)
}

pub fn dagger_surrogates(n_values: &[usize], alpha: &[f64], beta: &[f64]) -> DaggerSurrogates {
    let start = tail_start(n_values.len());
    let tail = start..n_values.len();
    if tail.is_empty() {
        return DaggerSurrogates { limsup_rule: None, liminf_rule: None };
    }
    let exponent = tail
        .clone()
        .map(|i| -beta[i].ln() / n_values[i] as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_alpha = tail.clone().map(|i| alpha[i]).fold(f64::NEG_INFINITY, f64::max);
    let min_alpha = tail.map(|i| alpha[i]).fold(f64::INFINITY, f64::min);
    DaggerSurrogates {
        limsup_rule: (max_alpha < ALPHA_CEILING).then_some(exponent),
        liminf_rule: (min_alpha < ALPHA_CEILING).then_some(exponent),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn pair(p: &[f64], q: &[f64], n: usize) -> DistributionPair {
        DistributionPair::new(p.to_vec(), q.to_vec(), n).unwrap()
    }

    #[test]
    fn validation() {
        assert!(DistributionPair::new(vec![0.5, 0.5], vec![1.0], 1).is_err());
        assert!(DistributionPair::new(vec![0.5, 0.6], vec![0.5, 0.5], 1).is_err());
        assert!(DistributionPair::new(vec![1.5, -0.5], vec![0.5, 0.5], 1).is_err());
        assert!(DistributionPair::new(vec![0.5, 0.5], vec![0.5, 0.5], 0).is_err());
    }

    #[test]
    fn threshold_examples() {
        let dp = pair(&[0.5, 0.3, 0.2, 0.0], &[0.2, 0.5, 0.0, 0.3], 1);
        let all = threshold_test(&dp, f64::NEG_INFINITY);
        assert_eq!(all.acceptance_mask, vec![true, true, true, false]);
        let none = threshold_test(&dp, f64::INFINITY);
        assert_eq!(none.acceptance_mask, vec![false, false, true, false]);

        let dp = pair(&[0.5, 0.5], &[0.25, 0.75], 1);
        let t = threshold_test(&dp, 0.0);
        assert_eq!(t.acceptance_mask, vec![true, false]);
        assert_eq!(classical_errors(&dp, &t), (0.5, 0.25));
        let t = threshold_test(&dp, f64::NEG_INFINITY);
        assert_eq!(classical_errors(&dp, &t), (0.0, 1.0));
        // Ties are accepted.
        let t = threshold_test(&dp, 2f64.ln());
        assert!(t.acceptance_mask[0]);
    }

    #[test]
    fn lemma4_examples() {
        let dp = pair(&[0.2, 0.8], &[0.7, 0.3], 1);
        assert!(verify_lemma4_bounds(&dp, 0.0).0);
        let kl = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl - 0.14384).abs() < 1e-5);
        // Full enumeration of 2^6 sequences.
        let p = steinlab_oracles::product_distribution(&[0.5, 0.5], 6);
        let q = steinlab_oracles::product_distribution(&[0.25, 0.75], 6);
        let dp = pair(&p, &q, 6);
        let (ok, slack) = verify_lemma4_bounds(&dp, kl - 0.1);
        assert!(ok && slack > 0.0);
        let (_, beta_oracle) = steinlab_oracles::threshold_errors_by_products(&p, &q, 6, kl - 0.1);
        let (_, beta) = classical_errors(&dp, &threshold_test(&dp, kl - 0.1));
        assert!((beta - beta_oracle).abs() < 1e-15);

        let dp = pair(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5], 2);
        for lambda in [-1.0, 0.0, 0.3, 5.0, f64::INFINITY] {
            assert!(verify_lemma4_bounds(&dp, lambda).0);
        }
    }

    #[test]
    fn np_examples() {
        let dp = pair(&[0.3, 0.7], &[0.3, 0.7], 1);
        let np = classical_np(&dp, 0.25).unwrap();
        assert!((np.beta_star - 0.75).abs() < 1e-15);
        let dp = pair(&[0.9, 0.1], &[0.2, 0.8], 1);
        let np = classical_np(&dp, 0.1).unwrap();
        assert_eq!(np.weights, vec![1.0, 0.0]);
        assert_eq!(np.randomization, 0.0);
        assert!((np.beta_star - 0.2).abs() < 1e-15 && (np.alpha - 0.1).abs() < 1e-15);
        assert!(classical_np(&dp, 0.0).is_err() && classical_np(&dp, 1.0).is_err());
    }

    #[test]
    fn np_matches_exhaustive_search() {
        let mut rng = crate::random::labeled_rng(1, "np");
        for trial in 0..200 {
            let m = 2 + trial % 11;
            let mut p = crate::random::dirichlet_spectrum(m, &mut rng);
            let q = crate::random::dirichlet_spectrum(m, &mut rng);
            if trial % 5 == 0 {
                p[0] = 0.0;
                let s: f64 = p.iter().sum();
                p.iter_mut().for_each(|v| *v /= s);
            }
            let dp = pair(&p, &q, 1);
            let eps: f64 = rng.random_range(0.01..0.99);
            let np = classical_np(&dp, eps).unwrap();
            let oracle = steinlab_oracles::exhaustive_np_beta(&p, &q, eps);
            assert!((np.beta_star - oracle).abs() < 1e-12, "trial {trial}: {} vs {oracle}", np.beta_star);
            assert!((np.alpha - eps).abs() < 1e-12 || np.alpha < eps);
        }
    }

    #[test]
    fn iid_types_match_enumeration() {
        let dp = DistributionPair::iid_types(&[0.5, 0.5], &[0.25, 0.75], 5).unwrap();
        assert_eq!(dp.len(), 6);
        let p = steinlab_oracles::product_distribution(&[0.5, 0.5], 5);
        let q = steinlab_oracles::product_distribution(&[0.25, 0.75], 5);
        let full = pair(&p, &q, 5);
        for lambda in [-0.5, 0.0, 0.1, 0.3] {
            let a = classical_errors(&dp, &threshold_test(&dp, lambda));
            let b = classical_errors(&full, &threshold_test(&full, lambda));
            assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
        let three = DistributionPair::iid_types(&[0.2, 0.3, 0.5], &[0.4, 0.4, 0.2], 4).unwrap();
        assert_eq!(three.len(), 15);
    }

    #[test]
    fn spectral_examples() {
        let kl = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        let dp = DistributionPair::iid_types(&[0.5, 0.5], &[0.25, 0.75], 512).unwrap();
        let rec = &spectral_functionals(&[dp]).unwrap()[0];
        let q05 = rec.quantiles.iter().find(|q| q.delta == 0.05).unwrap();
        assert!((q05.lower - kl).abs() < 0.05 && (q05.upper - kl).abs() < 0.05);
        assert_eq!(rec.grid.len(), 201);

        let same = pair(&[0.2, 0.8], &[0.2, 0.8], 3);
        let rec = &spectral_functionals(&[same]).unwrap()[0];
        assert!(rec.quantiles.iter().all(|q| q.lower == 0.0 && q.upper == 0.0));

        let disjoint = pair(&[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0], 1);
        let rec = &spectral_functionals(&[disjoint]).unwrap()[0];
        assert_eq!(rec.infinite_mass, 1.0);
        assert!(rec.cdf.iter().all(|&c| c == 0.0));
        assert!(spectral_functionals(&[]).is_err());
    }

    #[test]
    fn dagger_rules_differ_on_oscillating_alpha() {
        let n = [1, 2, 3, 4, 5];
        let beta = [0.5, 0.25, 0.125, 0.0625, 0.03125];
        let s = dagger_surrogates(&n, &[0.1, 0.2, 0.1, 0.2, 0.1], &beta);
        assert!((s.limsup_rule.unwrap() - 2f64.ln()).abs() < 1e-12);
        let s = dagger_surrogates(&n, &[0.1, 1.0, 0.2, 1.0, 0.3], &beta);
        assert!(s.limsup_rule.is_none() && s.liminf_rule.is_some());
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
        (2usize..10).prop_flat_map(|m| {
            (prop::collection::vec(0.0f64..1.0, m), prop::collection::vec(0.0f64..1.0, m), 1usize..8)
        })
        .prop_filter_map("nonzero mass", |(p, q, n)| {
            let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
            (sp > 1e-3 && sq > 1e-3).then(|| (p.iter().map(|v| v / sp).collect(), q.iter().map(|v| v / sq).collect(), n))
        })
    }

    proptest! {
        #[test]
        fn lemma4_bound_holds((p, q, n) in arb_pair(), lambda in -3.0f64..3.0) {
            let dp = DistributionPair::new(p, q, n).unwrap();
            prop_assert!(verify_lemma4_bounds(&dp, lambda).0);
        }

        #[test]
        fn threshold_errors_are_monotone((p, q, n) in arb_pair(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let dp = DistributionPair::new(p, q, n).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (alo, blo) = classical_errors(&dp, &threshold_test(&dp, lo));
            let (ahi, bhi) = classical_errors(&dp, &threshold_test(&dp, hi));
            prop_assert!(alo <= ahi + 1e-15 && bhi <= blo + 1e-15);
        }

        #[test]
        fn np_identity_against_random_tests((p, q, n) in arb_pair(), lambda in -2.0f64..2.0, w in prop::collection::vec(0.0f64..1.0, 10)) {
            let dp = DistributionPair::new(p, q, n).unwrap();
            let scale = (n as f64 * lambda).exp();
            let (a0, b0) = classical_errors(&dp, &threshold_test(&dp, lambda));
            let (a1, b1) = randomized_errors(&dp, &w[..dp.len()]);
            prop_assert!(a0 + scale * b0 <= a1 + scale * b1 + 1e-12 * (1.0 + scale));
        }

        #[test]
        fn np_beta_is_nonincreasing_in_epsilon((p, q, _n) in arb_pair(), e1 in 0.01f64..0.99, e2 in 0.01f64..0.99) {
            let dp = DistributionPair::new(p, q, 1).unwrap();
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(classical_np(&dp, hi).unwrap().beta_star <= classical_np(&dp, lo).unwrap().beta_star + 1e-12);
        }
    }
}
