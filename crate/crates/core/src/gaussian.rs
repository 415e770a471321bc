//! Displaced thermal states of one bosonic mode in a truncated Fock space and
//! the number-detection test between two of them.
//!
//! `n` copies are never simulated directly: after the concentrating unitaries
//! all information sits in one mode with amplitude `√n(θ₀ − θ₁)`, the others
//! being in the vacuum-centred thermal state, so only that mode is built.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::numerics;
use crate::operator_algebra::{neg_entropy, DensityOperator, HermitianOperator};

const MODULE: &str = "gaussian";

pub const QUADRATURE_NODES: usize = 64;
/// Largest tolerated probability mass beyond the cutoff.
pub const TRACE_DEFICIT_TOL: f64 = 1e-8;
pub const MIN_CUTOFF: usize = 40;

/// `ρ_θ` with mean thermal photon number `nbar`, truncated to `cutoff` Fock levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub theta: C64,
    pub nbar: f64,
    pub cutoff: usize,
}

impl GaussianParams {
    pub fn new(theta: C64, nbar: f64, cutoff: usize) -> Result<Self> {
        if !(nbar > 0.0 && nbar.is_finite()) {
            return Err(invalid("GaussianParams::new", format!("nbar must be positive, got {nbar}")));
        }
        if cutoff == 0 {
            return Err(invalid("GaussianParams::new", "cutoff must be positive".into()));
        }
        if !(theta.re.is_finite() && theta.im.is_finite()) {
            return Err(invalid("GaussianParams::new", "theta must be finite".into()));
        }
        Ok(GaussianParams { theta, nbar, cutoff })
    }
}

fn invalid(op: &'static str, why: String) -> Error {
    Error::new(MODULE, op, ErrorKind::InvalidParameter(why))
}

/// `cutoff ≥ max(40, ⌈8(N̄ + n|Δθ|²)⌉)`.
pub fn policy_cutoff(nbar: f64, n: usize, delta: f64) -> usize {
    MIN_CUTOFF.max((8.0 * (nbar + n as f64 * delta * delta)).ceil() as usize)
}

/// Photon-number law `P(k) = ⟨k|ρ|k⟩` for `k < cutoff`; the missing mass is `deficit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumberDistribution {
    pub probs: Vec<f64>,
    pub deficit: f64,
}

impl NumberDistribution {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum::<f64>() / self.probs.iter().sum::<f64>()
    }
}

/// `ln |⟨k|α⟩|` for `k < cutoff`.
fn coherent_log_magnitudes(alpha: C64, cutoff: usize) -> Vec<f64> {
    let r = alpha.norm();
    let mut out = Vec::with_capacity(cutoff);
    let mut ln_fact = 0.0;
    for k in 0..cutoff {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let ln_power = if k == 0 { 0.0 } else if r == 0.0 { f64::NEG_INFINITY } else { k as f64 * r.ln() };
        out.push(-0.5 * r * r + ln_power - 0.5 * ln_fact);
    }
    out
}

/// Truncated coherent vector `e^{−|α|²/2} Σ αᵏ/√(k!) |k⟩`, computed in log-magnitude form.
pub fn coherent_vector(alpha: C64, cutoff: usize) -> CVec {
    let phase = alpha.arg();
    let mags = coherent_log_magnitudes(alpha, cutoff);
    CVec::from_iterator(cutoff, mags.iter().enumerate().map(|(k, &m)| C64::from_polar(m.exp(), k as f64 * phase)))
}

/// Nodes `α_ij = θ + √N̄(x_i + i x_j)` with weights `w_i w_j / π`.
fn quadrature(theta: C64, nbar: f64) -> Vec<(C64, f64)> {
    let (x, w) = numerics::gauss_hermite(QUADRATURE_NODES);
    let s = nbar.sqrt();
    let mut out = Vec::with_capacity(x.len() * x.len());
    for i in 0..x.len() {
        for j in 0..x.len() {
            out.push((theta + c(s * x[i], s * x[j]), w[i] * w[j] / std::f64::consts::PI));
        }
    }
    out
}

fn cutoff_error(op: &'static str, deficit: f64, gp: &GaussianParams) -> Error {
    let suggested = policy_cutoff(gp.nbar, 1, gp.theta.norm()).max(2 * gp.cutoff);
    Error::new(MODULE, op, ErrorKind::Cutoff { deficit, suggested })
}

/// Diagonal of the quadrature sum for `ρ_θ`, without forming the matrix.
pub fn number_distribution(gp: &GaussianParams) -> Result<NumberDistribution> {
    let nodes = quadrature(gp.theta, gp.nbar);
    let partial = nodes
        .par_chunks(QUADRATURE_NODES)
        .map(|chunk| {
            let mut acc = vec![0.0; gp.cutoff];
            for &(alpha, w) in chunk {
                for (a, m) in acc.iter_mut().zip(coherent_log_magnitudes(alpha, gp.cutoff)) {
                    *a += w * (2.0 * m).exp();
                }
            }
            acc
        })
        .collect::<Vec<_>>();
    let mut probs = vec![0.0; gp.cutoff];
    for row in partial {
        probs.iter_mut().zip(row).for_each(|(p, v)| *p += v);
    }
    let deficit = 1.0 - probs.iter().sum::<f64>();
    if deficit > TRACE_DEFICIT_TOL {
        return Err(cutoff_error("number_distribution", deficit, gp));
    }
    Ok(NumberDistribution { probs, deficit: deficit.max(0.0) })
}

/// `ρ_θ` by tensor Gauss–Hermite quadrature of the coherent-state mixture,
/// renormalized, together with the mass lost to truncation.
pub fn gaussian_state_with_deficit(gp: &GaussianParams) -> Result<(DensityOperator, f64)> {
    let nodes = quadrature(gp.theta, gp.nbar);
    let mut v = CMat::zeros(gp.cutoff, nodes.len());
    for (j, &(alpha, w)) in nodes.iter().enumerate() {
        v.set_column(j, &(coherent_vector(alpha, gp.cutoff) * c(w.sqrt(), 0.0)));
    }
    let rho = &v * v.adjoint();
    let trace = rho.trace().re;
    let deficit = 1.0 - trace;
    if deficit > TRACE_DEFICIT_TOL {
        return Err(cutoff_error("gaussian_state", deficit, gp));
    }
    let state = DensityOperator::from_matrix(rho / c(trace, 0.0))?;
    Ok((state, deficit.max(0.0)))
}

pub fn gaussian_state(gp: &GaussianParams) -> Result<DensityOperator> {
    Ok(gaussian_state_with_deficit(gp)?.0)
}

/// `Σ_k N̄ᵏ/(1+N̄)^{k+1} |k⟩⟨k|`, truncated.
pub fn thermal_diagonal(nbar: f64, cutoff: usize) -> Vec<f64> {
    let ratio = nbar / (1.0 + nbar);
    (0..cutoff).map(|k| ratio.powi(k as i32) / (1.0 + nbar)).collect()
}

/// `D(θ) ρ_thermal D(θ)†` built in `cutoff + margin` levels and truncated,
/// with `D(θ) = exp(θa† − θ̄a)` from the eigendecomposition of its Hermitian generator.
pub fn displaced_thermal_state(gp: &GaussianParams, margin: usize) -> Result<DensityOperator> {
    let big = gp.cutoff + margin;
    let mut generator = CMat::zeros(big, big);
    // i(θa† − θ̄a) is Hermitian.
    for k in 1..big {
        let s = (k as f64).sqrt();
        generator[(k, k - 1)] = c(0.0, 1.0) * gp.theta * s;
        generator[(k - 1, k)] = c(0.0, -1.0) * gp.theta.conj() * s;
        // i(θ a†)_{k,k−1} and i(−θ̄ a)_{k−1,k}.
    }
    let e = linalg::eigh(&generator)?;
    let phases: Vec<C64> = e.values.iter().map(|&l| C64::from_polar(1.0, -l)).collect();
    let mut scaled = e.vectors.clone();
    for (j, p) in phases.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= p);
    }
    let displacement = scaled * e.vectors.adjoint();
    let thermal = linalg::real_diagonal(&thermal_diagonal(gp.nbar, big));
    let full = &displacement * thermal * displacement.adjoint();
    let truncated = full.view((0, 0), (gp.cutoff, gp.cutoff)).into_owned();
    let trace = truncated.trace().re;
    let deficit = 1.0 - trace;
    if deficit > TRACE_DEFICIT_TOL {
        return Err(cutoff_error("displaced_thermal_state", deficit, gp));
    }
    DensityOperator::from_matrix(truncated / c(trace, 0.0))
}

/// Spectral norm of the difference of two Hermitian operators.
pub fn operator_norm_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    let diff = HermitianOperator::from_matrix_unchecked(a.matrix() - b.matrix());
    let values = diff.eigenvalues()?;
    Ok(values[0].abs().max(values.last().expect("nonempty").abs()))
}

/// Number statistics of the concentrated mode, amplitude `√n(θ₀ − θ₁)`.
pub fn reduced_number_distribution(theta0: C64, theta1: C64, nbar: f64, n: usize, cutoff: usize) -> Result<NumberDistribution> {
    if n == 0 {
        return Err(invalid("reduced_number_distribution", "n must be positive".into()));
    }
    let amplitude = (theta0 - theta1) * (n as f64).sqrt();
    number_distribution(&GaussianParams::new(amplitude, nbar, cutoff)?)
}

/// Errors of number detection on `n` copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianErrors {
    /// Null mass outside `|√(k/n) − |Δθ|| ≤ ε`.
    pub alpha: f64,
    /// Alternative mass of `√(k/n) ≥ |Δθ| − ε`.
    pub beta: f64,
    /// Alternative mass of `√(k/n) ≥ |Δθ|`.
    pub beta_center: f64,
}

/// Mass beyond the cutoff is placed at `k = cutoff` when assigning it to a region.
pub fn gaussian_test_errors_detail(
    theta0: C64,
    theta1: C64,
    nbar: f64,
    n: usize,
    eps_region: f64,
    cutoff: usize,
) -> Result<GaussianErrors> {
    if eps_region.is_nan() || eps_region <= 0.0 {
        return Err(invalid("gaussian_test_errors", format!("eps_region must be positive, got {eps_region}")));
    }
    let delta = (theta0 - theta1).norm();
    let null = reduced_number_distribution(theta0, theta1, nbar, n, cutoff)?;
    let alt = reduced_number_distribution(theta1, theta1, nbar, n, cutoff)?;
    let nf = n as f64;
    let stat = |k: usize| (k as f64 / nf).sqrt();
    let accepted = |k: usize| (stat(k) - delta).abs() <= eps_region;
    let mut alpha: f64 = null.probs.iter().enumerate().filter(|(k, _)| !accepted(*k)).map(|(_, p)| p).sum();
    let mut beta: f64 = alt.probs.iter().enumerate().filter(|(k, _)| stat(*k) >= delta - eps_region).map(|(_, p)| p).sum();
    let mut beta_center: f64 = alt.probs.iter().enumerate().filter(|(k, _)| stat(*k) >= delta).map(|(_, p)| p).sum();
    if !accepted(cutoff) {
        alpha += null.deficit;
    }
    if stat(cutoff) >= delta - eps_region {
        beta += alt.deficit;
    }
    if stat(cutoff) >= delta {
        beta_center += alt.deficit;
    }
    Ok(GaussianErrors { alpha, beta, beta_center })
}

pub fn gaussian_test_errors(theta0: C64, theta1: C64, nbar: f64, n: usize, eps_region: f64, cutoff: usize) -> Result<(f64, f64)> {
    let e = gaussian_test_errors_detail(theta0, theta1, nbar, n, eps_region, cutoff)?;
    Ok((e.alpha, e.beta))
}

/// `|θ₀ − θ₁|² log(1 + 1/N̄)`.
pub fn gaussian_relative_entropy(theta0: C64, theta1: C64, nbar: f64) -> Result<f64> {
    if nbar.is_nan() || nbar <= 0.0 {
        return Err(invalid("gaussian_relative_entropy", format!("nbar must be positive, got {nbar}")));
    }
    Ok((theta0 - theta1).norm_sqr() * (1.0 + 1.0 / nbar).ln())
}

/// `D(ρ_{θ₀−θ₁} ‖ ρ_0)` between truncated matrices. The thermal reference is
/// diagonal, so `Tr ρ log ρ_0` uses its exact level logarithms; levels far out
/// in the tail would otherwise fall below any numerical support threshold.
pub fn truncated_relative_entropy(theta0: C64, theta1: C64, nbar: f64, cutoff: usize) -> Result<f64> {
    let rho = gaussian_state(&GaussianParams::new(theta0 - theta1, nbar, cutoff)?)?;
    let thermal = thermal_diagonal(nbar, cutoff);
    let ln_total = thermal.iter().sum::<f64>().ln();
    let ratio = (nbar / (1.0 + nbar)).ln();
    let cross: f64 = (0..cutoff)
        .map(|k| rho.matrix()[(k, k)].re * (k as f64 * ratio - (1.0 + nbar).ln() - ln_total))
        .sum();
    Ok(neg_entropy(&rho)? - cross)
}

/// One row of a Gaussian sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPoint {
    pub n: usize,
    pub cutoff: usize,
    pub alpha: f64,
    pub beta: f64,
    pub beta_center: f64,
    pub minus_log_beta_over_n: f64,
    pub closed_form_d: f64,
}

/// Sweep over `ns`; a zero `cutoff` selects the policy cutoff per point.
pub fn gaussian_sweep(theta0: C64, theta1: C64, nbar: f64, ns: &[usize], eps_region: f64, cutoff: usize) -> Result<Vec<GaussianPoint>> {
    let d = gaussian_relative_entropy(theta0, theta1, nbar)?;
    let delta = (theta0 - theta1).norm();
    ns.par_iter()
        .map(|&n| {
            let k = if cutoff == 0 { policy_cutoff(nbar, n, delta) } else { cutoff };
            let e = gaussian_test_errors_detail(theta0, theta1, nbar, n, eps_region, k)?;
            Ok(GaussianPoint {
                n,
                cutoff: k,
                alpha: e.alpha,
                beta: e.beta,
                beta_center: e.beta_center,
                minus_log_beta_over_n: -e.beta.ln() / n as f64,
                closed_form_d: d,
            })
        })
        .collect()
}
