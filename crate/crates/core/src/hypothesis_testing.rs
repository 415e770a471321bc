//! Optimal quantum tests between `ρ^{⊗n}` and `σ^{⊗n}` and the
//! measure-then-test pipeline, with error exponents estimated across `n`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorKind, Result};
use crate::info_spectrum::{self, DaggerSurrogates, DistributionPair};
use crate::limits;
use crate::linalg::{self, CMat};
use crate::measurement_design::{design_measurement, DesignedMeasurement};
use crate::numerics;
use crate::operator_algebra::{
    kron_power, measure, DensityOperator, HermitianOperator, TestOperator, SUPPORT_EPS,
};
use crate::schur_weyl::irreducible_decomposition;

const MODULE: &str = "hypothesis_testing";

/// Relative gap below which pencil eigenvalues are one likelihood-ratio level.
pub const PENCIL_CLUSTER_TOL: f64 = 1e-9;
const BISECTION_STEPS: usize = 200;

/// `A = P_{>} + w·K` with `P_{>}` the positive part of `ρ_n − c σ_n` and `K` its kernel.
#[derive(Debug, Clone)]
pub struct NpTest {
    pub projector_part: TestOperator,
    /// Orthonormal basis of the randomized kernel (possibly zero columns).
    pub kernel: CMat,
    pub boundary_weight: f64,
    /// `λ = (1/n) log c`, nats per copy.
    pub threshold: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl NpTest {
    /// The full test operator.
    pub fn operator(&self) -> TestOperator {
        let mut m = self.projector_part.operator().matrix().clone();
        if self.kernel.ncols() > 0 && self.boundary_weight > 0.0 {
            m += linalg::projector(&self.kernel).scale(self.boundary_weight);
        }
        TestOperator::from_operator_unchecked(HermitianOperator::from_matrix_unchecked(m))
    }
}

fn check_epsilon(epsilon: f64, op: &'static str) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::new(MODULE, op, ErrorKind::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}"))))
    }
}

struct Pencil<'a> {
    rho: &'a CMat,
    sigma: &'a CMat,
}

struct Cut {
    positive: CMat,
    kernel: CMat,
    accept_rho: f64,
    accept_sigma: f64,
    kernel_rho: f64,
    kernel_sigma: f64,
}

impl Pencil<'_> {
    /// Top `positive` and next `kernel_dim` eigenvectors of `ρ − cσ`.
    fn cut(&self, c: f64, positive: usize, kernel_dim: usize) -> Result<Cut> {
        let diff = self.rho - self.sigma.scale(c);
        let e = linalg::eigh(&diff)?;
        let p = linalg::select_columns(&e.vectors, 0..positive);
        let k = linalg::select_columns(&e.vectors, positive..positive + kernel_dim);
        let mass = |b: &CMat, x: &CMat| if b.ncols() == 0 { 0.0 } else { (b.adjoint() * x * b).trace().re };
        Ok(Cut {
            accept_rho: mass(&p, self.rho),
            accept_sigma: mass(&p, self.sigma),
            kernel_rho: mass(&k, self.rho),
            kernel_sigma: mass(&k, self.sigma),
            positive: p,
            kernel: k,
        })
    }
}

/// Descending distinct values of a descending list, with multiplicities.
fn levels(values: &[f64]) -> Vec<(f64, usize)> {
    let scale = values[0].abs().max(1.0);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some(last) if (last.2 - v).abs() <= PENCIL_CLUSTER_TOL * scale => {
                last.1 += 1;
                last.0 += v;
                last.2 = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(sum, m, _)| (sum / m as f64, m)).collect()
}

/// Exact Neyman–Pearson test at level `ε`; `copies` normalizes the reported threshold.
pub fn quantum_np_test_copies(rho_n: &DensityOperator, sigma_n: &DensityOperator, epsilon: f64, copies: usize) -> Result<NpTest> {
    let op = "quantum_np_test";
    check_epsilon(epsilon, op)?;
    if rho_n.dim() != sigma_n.dim() {
        return Err(Error::new(MODULE, op, ErrorKind::DimensionMismatch { expected: sigma_n.dim(), found: rho_n.dim() }));
    }
    let se = sigma_n.eigh()?;
    let min_eig = *se.values.last().expect("nonempty");
    if min_eig <= SUPPORT_EPS {
        return Err(Error::new(MODULE, op, ErrorKind::SingularState { min_eig }));
    }
    let inv_sqrt: Vec<f64> = se.values.iter().map(|v| v.powf(-0.5)).collect();
    let whitening = linalg::reconstruct(&se.vectors, &inv_sqrt);
    np_from_pencil(rho_n, sigma_n, &whitening, epsilon, copies)
}

pub fn quantum_np_test(rho_n: &DensityOperator, sigma_n: &DensityOperator, epsilon: f64) -> Result<NpTest> {
    quantum_np_test_copies(rho_n, sigma_n, epsilon, 1)
}

fn np_from_pencil(rho_n: &DensityOperator, sigma_n: &DensityOperator, whitening: &CMat, epsilon: f64, copies: usize) -> Result<NpTest> {
    let op = "quantum_np_test";
    let dim = rho_n.dim();
    let pencil_matrix = whitening * rho_n.matrix() * whitening;
    let pencil_values = linalg::eigh(&pencil_matrix)?.values;
    let lv = levels(&pencil_values);
    let above: Vec<usize> = lv.iter().scan(0, |acc, &(_, m)| {
        let before = *acc;
        *acc += m;
        Some(before)
    }).collect();
    let pencil = Pencil { rho: rho_n.matrix(), sigma: sigma_n.matrix() };
    let target = 1.0 - epsilon;
    // Smallest level index whose closed acceptance region already carries 1 − ε.
    let loose = |j: usize| -> Result<f64> {
        let cut = pencil.cut(lv[j].0, above[j], lv[j].1)?;
        Ok(cut.accept_rho + cut.kernel_rho)
    };
    let (mut lo, mut hi) = (0usize, lv.len() - 1);
    if loose(hi)? < target - 1e-12 {
        return Err(Error::new(MODULE, op, ErrorKind::Computation("acceptance never reaches 1 - epsilon".into())));
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if loose(mid)? >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let j = lo;
    let (c_j, m_j) = lv[j];
    let cut = pencil.cut(c_j, above[j], m_j)?;
    let finish = |positive: CMat, kernel: CMat, weight: f64, c: f64, accept: f64, beta: f64| -> NpTest {
        let projector = HermitianOperator::from_matrix_unchecked(if positive.ncols() == 0 {
            CMat::zeros(dim, dim)
        } else {
            linalg::projector(&positive)
        });
        NpTest {
            projector_part: TestOperator::from_operator_unchecked(projector),
            kernel,
            boundary_weight: weight,
            threshold: if c > 0.0 { c.ln() / copies as f64 } else { f64::NEG_INFINITY },
            alpha: 1.0 - accept,
            beta,
        }
    };
    if cut.accept_rho <= target {
        let w = if cut.kernel_rho > 0.0 { ((target - cut.accept_rho) / cut.kernel_rho).clamp(0.0, 1.0) } else { 0.0 };
        let accept = cut.accept_rho + w * cut.kernel_rho;
        let beta = cut.accept_sigma + w * cut.kernel_sigma;
        return Ok(finish(cut.positive, cut.kernel, w, c_j, accept, beta));
    }
    // The crossing lies strictly between c_j and c_{j-1}, where the acceptance
    // mass varies continuously with c at a fixed number of positive directions.
    let count = above[j];
    let (mut c_lo, mut c_hi) = (c_j, lv[j - 1].0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (c_lo + c_hi);
        if mid <= c_lo || mid >= c_hi {
            break;
        }
        if pencil.cut(mid, count, 0)?.accept_rho > target {
            c_lo = mid;
        } else {
            c_hi = mid;
        }
    }
    // The lower end keeps α ≤ ε.
    let cut = pencil.cut(c_lo, count, 0)?;
    Ok(finish(cut.positive, CMat::zeros(dim, 0), 0.0, c_lo, cut.accept_rho, cut.accept_sigma))
}

/// `β*_n(ε)`.
pub fn beta_star(rho: &DensityOperator, sigma: &DensityOperator, n: usize, epsilon: f64) -> Result<f64> {
    Ok(np_test_for_copies(rho, sigma, n, epsilon)?.beta)
}

/// Optimal test on `n` copies; `σ^{⊗n}`'s whitening comes from the single-copy one.
pub fn np_test_for_copies(rho: &DensityOperator, sigma: &DensityOperator, n: usize, epsilon: f64) -> Result<NpTest> {
    let op = "beta_star";
    check_epsilon(epsilon, op)?;
    if rho.dim() != sigma.dim() {
        return Err(Error::new(MODULE, op, ErrorKind::DimensionMismatch { expected: sigma.dim(), found: rho.dim() }));
    }
    limits::checked_power_dim(rho.dim(), n, MODULE, op)?;
    let se = sigma.eigh()?;
    let min_eig = *se.values.last().expect("nonempty");
    if min_eig <= SUPPORT_EPS {
        return Err(Error::new(MODULE, op, ErrorKind::SingularState { min_eig }));
    }
    let inv_sqrt: Vec<f64> = se.values.iter().map(|v| v.powf(-0.5)).collect();
    let whitening = kron_power(&linalg::reconstruct(&se.vectors, &inv_sqrt), n, op)?;
    let rho_n = crate::operator_algebra::tensor_power(rho, n)?;
    let sigma_n = crate::operator_algebra::tensor_power(sigma, n)?;
    np_from_pencil(&rho_n, &sigma_n, &whitening, epsilon, n)
}

/// Classical NP β on the outcome statistics of `dm`.
pub fn measured_beta(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    n: usize,
    epsilon: f64,
    dm: &DesignedMeasurement,
) -> Result<f64> {
    Ok(measured_np(rho, sigma, n, epsilon, dm)?.beta_star)
}

fn measured_np(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    n: usize,
    epsilon: f64,
    dm: &DesignedMeasurement,
) -> Result<info_spectrum::ClassicalNp> {
    let op = "measured_beta";
    check_epsilon(epsilon, op)?;
    let rho_n = crate::operator_algebra::tensor_power(rho, n)?;
    let sigma_n = crate::operator_algebra::tensor_power(sigma, n)?;
    let p = measure(&rho_n, &dm.m).map_err(|e| Error::new(MODULE, op, e.kind))?.probabilities;
    let q = measure(&sigma_n, &dm.m).map_err(|e| Error::new(MODULE, op, e.kind))?.probabilities;
    // Clipped rounding can leave these a hair off 1.
    let pair = DistributionPair { n, p: normalized(p), q: normalized(q) };
    info_spectrum::classical_np(&pair, epsilon)
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// How the `n`-copy test is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    QuantumNp,
    DesignedMeasurement,
    /// Each copy measured in the eigenbasis of `σ`, then classical NP.
    NaiveProductBasis,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::QuantumNp, Strategy::DesignedMeasurement, Strategy::NaiveProductBasis];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::QuantumNp => "quantum_np",
            Strategy::DesignedMeasurement => "designed_measurement",
            Strategy::NaiveProductBasis => "naive_product_basis",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::new(MODULE, "Strategy::from_str", ErrorKind::Parse(format!("unknown strategy '{s}'"))))
    }
}

/// `−log β` against `n`, with the least-squares slope over the largest 60% of `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentCurve {
    pub strategy: Strategy,
    pub epsilon: f64,
    pub n_values: Vec<usize>,
    pub beta_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub slope_estimate: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    /// Index of the first point used in the fit.
    pub fit_start: usize,
}

impl ExponentCurve {
    pub fn minus_log_beta_over_n(&self) -> Vec<f64> {
        self.n_values.iter().zip(&self.beta_values).map(|(&n, b)| -b.ln() / n as f64).collect()
    }

    pub fn beta_at(&self, n: usize) -> Option<f64> {
        self.n_values.iter().position(|&m| m == n).map(|i| self.beta_values[i])
    }

    /// Both finite-n readings of the large-deviation functional; see [`DaggerSurrogates`].
    pub fn dagger_surrogates(&self) -> DaggerSurrogates {
        info_spectrum::dagger_surrogates(&self.n_values, &self.alpha_values, &self.beta_values)
    }
}

/// `(α, β)` of one strategy at `n` copies.
pub fn strategy_point(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    epsilon: f64,
    n: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<(f64, f64)> {
    match strategy {
        Strategy::QuantumNp => {
            let t = np_test_for_copies(rho, sigma, n, epsilon)?;
            Ok((t.alpha, t.beta))
        }
        Strategy::DesignedMeasurement => {
            let decomp = irreducible_decomposition(n, rho.dim(), seed)?;
            let dm = design_measurement(rho, sigma, &decomp)?;
            let np = measured_np(rho, sigma, n, epsilon, &dm)?;
            Ok((np.alpha, np.beta_star))
        }
        Strategy::NaiveProductBasis => {
            check_epsilon(epsilon, "exponent_curve")?;
            let e = sigma.eigh()?;
            let rotated = e.vectors.adjoint() * rho.matrix() * &e.vectors;
            let p1 = normalized((0..rho.dim()).map(|i| rotated[(i, i)].re.max(0.0)).collect());
            let q1 = normalized(e.values.iter().map(|v| v.max(0.0)).collect());
            let pair = DistributionPair::iid_types(&p1, &q1, n)?;
            let np = info_spectrum::classical_np(&pair, epsilon)?;
            Ok((np.alpha, np.beta_star))
        }
    }
}

pub fn exponent_curve(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    epsilon: f64,
    n_range: &[usize],
    strategy: Strategy,
    seed: u64,
) -> Result<ExponentCurve> {
    let op = "exponent_curve";
    check_epsilon(epsilon, op)?;
    if n_range.is_empty() || n_range.windows(2).any(|w| w[0] >= w[1]) || n_range[0] == 0 {
        return Err(Error::new(MODULE, op, ErrorKind::InvalidParameter("n range must be nonempty, positive and ascending".into())));
    }
    if strategy != Strategy::NaiveProductBasis {
        limits::checked_power_dim(rho.dim(), *n_range.last().expect("nonempty"), MODULE, op)?;
    }
    let points = n_range
        .par_iter()
        .map(|&n| strategy_point(rho, sigma, epsilon, n, strategy, seed))
        .collect::<Result<Vec<_>>>()?;
    let (alpha_values, beta_values): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let fit_start = info_spectrum::tail_start(n_range.len());
    let (xs, ys): (Vec<f64>, Vec<f64>) = (fit_start..n_range.len())
        .filter(|&i| alpha_values[i] <= epsilon + 1e-9 && beta_values[i] > 0.0)
        .map(|i| (n_range[i] as f64, -beta_values[i].ln()))
        .unzip();
    let (slope_estimate, intercept, rms_residual) = match numerics::least_squares(&xs, &ys) {
        Some(fit) => (fit.slope, fit.intercept, fit.rms_residual),
        None if xs.len() == 1 => (ys[0] / xs[0], 0.0, 0.0),
        None => {
            return Err(Error::new(MODULE, op, ErrorKind::Computation("no admissible points to fit".into())));
        }
    };
    Ok(ExponentCurve {
        strategy,
        epsilon,
        n_values: n_range.to_vec(),
        beta_values,
        alpha_values,
        slope_estimate,
        intercept,
        rms_residual,
        fit_start,
    })
}
