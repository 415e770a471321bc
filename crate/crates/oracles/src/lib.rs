//! Brute-force reference computations.
//!
//! Nothing here shares code with the `steinlab` implementation paths it is
//! used to check: values come from enumeration, explicit coupling rules or
//! exhaustive search.

use std::collections::BTreeMap;

/// Block dimensions of `n` spin-1/2 factors by repeated angular-momentum
/// coupling `j ⊗ 1/2 = (j + 1/2) ⊕ (j − 1/2)`. Keys are `2j + 1`.
pub fn qubit_coupling_blocks(n: usize) -> BTreeMap<usize, usize> {
    // Track twice the spin to stay in integers.
    let mut spins: BTreeMap<usize, usize> = BTreeMap::new();
    spins.insert(1, 1);
    for _ in 1..n {
        let mut next = BTreeMap::new();
        for (&two_j, &mult) in &spins {
            *next.entry(two_j + 1).or_insert(0) += mult;
            if two_j > 0 {
                *next.entry(two_j - 1).or_insert(0) += mult;
            }
        }
        spins = next;
    }
    spins.into_iter().map(|(two_j, m)| (two_j + 1, m)).collect()
}

/// Number of monomials of total degree `n` in `k` variables, by enumeration.
pub fn count_monomials(k: usize, n: usize) -> usize {
    fn go(vars: usize, degree: usize) -> usize {
        if vars == 1 {
            return 1;
        }
        (0..=degree).map(|d| go(vars - 1, degree - d)).sum()
    }
    if k == 0 {
        return 0;
    }
    go(k, n)
}

/// Product distribution `p^{⊗n}` listed over all `k^n` sequences.
pub fn product_distribution(p: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..n {
        out = out.iter().flat_map(|&a| p.iter().map(move |&b| a * b)).collect();
    }
    out
}

/// Smallest second-kind error over all tests that accept a subset
/// deterministically plus at most one outcome with a randomized weight, subject
/// to first-kind error `≤ eps`. Exhaustive, so limited to a dozen outcomes.
pub fn exhaustive_np_beta(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let n = p.len();
    assert!(n <= 14, "exhaustive search is exponential");
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let (mut pa, mut qa) = (0.0, 0.0);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                pa += p[i];
                qa += q[i];
            }
        }
        let alpha = 1.0 - pa;
        if alpha <= eps + 1e-15 {
            best = best.min(qa);
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || p[j] <= 0.0 {
                continue;
            }
            let w = (alpha - eps) / p[j];
            if w <= 1.0 {
                best = best.min(qa + w * q[j]);
            }
        }
    }
    best
}

/// Pairs `(S_n(λ)` acceptance under the same rule, evaluated independently)`.
/// Returns `(alpha, beta)` for the threshold test that accepts outcomes with
/// `p ≥ e^{nλ} q`, evaluated with products rather than logarithms.
pub fn threshold_errors_by_products(p: &[f64], q: &[f64], n: usize, lambda: f64) -> (f64, f64) {
    let factor = (n as f64 * lambda).exp();
    let (mut alpha, mut beta) = (0.0, 0.0);
    for (&pi, &qi) in p.iter().zip(q) {
        let accept = pi > 0.0 && pi >= factor * qi;
        if accept {
            beta += qi;
        } else {
            alpha += pi;
        }
    }
    (alpha, beta)
}

/// `max_p p (ln p)² + (1−p)(ln(1−p))²` by a plain grid over `(0, 1)` followed
/// by bisection on the sign of the derivative around the best grid point.
pub fn plog2_grid_two_point(step: f64) -> f64 {
    let f = |p: f64| {
        let g = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() * x.ln() };
        g(p) + g(1.0 - p)
    };
    let mut best = (0.0, f64::NEG_INFINITY);
    let steps = (1.0 / step) as usize;
    for i in 1..steps {
        let p = i as f64 * step;
        let v = f(p);
        if v > best.1 {
            best = (p, v);
        }
    }
    // f'(p) = (ln p)² + 2 ln p − (ln(1−p))² − 2 ln(1−p).
    let df = |p: f64| {
        let (a, b) = (p.ln(), (1.0 - p).ln());
        a * a + 2.0 * a - b * b - 2.0 * b
    };
    let (mut lo, mut hi) = ((best.0 - step).max(step / 2.0), (best.0 + step).min(1.0 - step / 2.0));
    if df(lo) > 0.0 && df(hi) < 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if df(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return f(0.5 * (lo + hi)).max(best.1);
    }
    best.1
}

/// Photon-number law of a displaced thermal state with `|amplitude|² = a2`:
/// `P(k) = N̄ᵏ/(1+N̄)^{k+1} e^{−a2/(1+N̄)} L_k(−a2/(N̄(1+N̄)))`, Laguerre
/// polynomials by their three-term recurrence.
pub fn displaced_thermal_number_law(a2: f64, nbar: f64, cutoff: usize) -> Vec<f64> {
    let x = -a2 / (nbar * (1.0 + nbar));
    let mut out = Vec::with_capacity(cutoff);
    let (mut l_prev, mut l) = (0.0, 1.0);
    let ratio = nbar / (1.0 + nbar);
    let front = (-a2 / (1.0 + nbar)).exp() / (1.0 + nbar);
    for k in 0..cutoff {
        out.push(front * ratio.powi(k as i32) * l);
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * l - kf * l_prev) / (kf + 1.0);
        l_prev = l;
        l = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_small_cases() {
        assert_eq!(qubit_coupling_blocks(1), BTreeMap::from([(2, 1)]));
        assert_eq!(qubit_coupling_blocks(3), BTreeMap::from([(2, 2), (4, 1)]));
        assert_eq!(qubit_coupling_blocks(4), BTreeMap::from([(1, 2), (3, 3), (5, 1)]));
        for n in 1..12 {
            let total: usize = qubit_coupling_blocks(n).iter().map(|(d, m)| d * m).sum();
            assert_eq!(total, 1 << n);
        }
    }

    #[test]
    fn monomials() {
        assert_eq!(count_monomials(3, 2), 6);
        assert_eq!(count_monomials(2, 3), 4);
        assert_eq!(count_monomials(1, 7), 1);
    }

    #[test]
    fn exhaustive_np_two_outcomes() {
        let b = exhaustive_np_beta(&[0.9, 0.1], &[0.2, 0.8], 0.1);
        assert!((b - 0.2).abs() < 1e-15);
        let b = exhaustive_np_beta(&[0.5, 0.5], &[0.5, 0.5], 0.3);
        assert!((b - 0.7).abs() < 1e-15);
    }
}
