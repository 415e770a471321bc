use crate::error::{Error, ErrorKind, Result};
use crate::limits;
use crate::linalg::{self, CMat};

use super::hermitian::{DensityOperator, HermitianOperator, TestOperator};

const MODULE: &str = "operator_algebra";

/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_EPS: f64 = 1e-14;
/// Largest first-argument mass tolerated outside the reference support.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

/// How logarithms treat zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportMode {
    /// Reject singular arguments.
    #[default]
    Strict,
    /// Take logs on the support only; kernel directions map to 0.
    Restricted,
}

fn check_dims(expected: usize, found: usize, op: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::new(MODULE, op, ErrorKind::DimensionMismatch { expected, found }));
    }
    Ok(())
}

/// `X^{⊗n}` for an arbitrary square matrix, subject to the dimension cap.
pub fn kron_power(x: &CMat, n: usize, op: &'static str) -> Result<CMat> {
    if n == 0 {
        return Err(Error::new(MODULE, op, ErrorKind::InvalidParameter("tensor power needs n >= 1".into())));
    }
    limits::checked_power_dim(x.nrows(), n, MODULE, op)?;
    let mut acc = x.clone();
    for _ in 1..n {
        acc = linalg::kron(&acc, x);
    }
    Ok(acc)
}

/// `ρ^{⊗n}`.
pub fn tensor_power(s: &DensityOperator, n: usize) -> Result<DensityOperator> {
    let m = kron_power(s.matrix(), n, "tensor_power")?;
    Ok(DensityOperator::from_operator_unchecked(HermitianOperator::from_matrix_unchecked(m)))
}

pub fn tensor_power_operator(x: &HermitianOperator, n: usize) -> Result<HermitianOperator> {
    Ok(HermitianOperator::from_matrix_unchecked(kron_power(x.matrix(), n, "tensor_power")?))
}

fn scalar_log(v: f64, mode: SupportMode, min_eig: f64, op: &'static str) -> Result<f64> {
    match (v > SUPPORT_EPS, mode) {
        (true, _) => Ok(v.ln()),
        (false, SupportMode::Restricted) => Ok(0.0),
        (false, SupportMode::Strict) => Err(Error::new(MODULE, op, ErrorKind::SingularState { min_eig })),
    }
}

/// Natural matrix logarithm by functional calculus.
pub fn matrix_log(s: &DensityOperator, mode: SupportMode) -> Result<HermitianOperator> {
    let e = s.eigh()?;
    let min_eig = *e.values.last().expect("nonempty");
    let logs = e
        .values
        .iter()
        .map(|&v| scalar_log(v, mode, min_eig, "matrix_log"))
        .collect::<Result<Vec<_>>>()?;
    Ok(HermitianOperator::from_matrix_unchecked(linalg::reconstruct(&e.vectors, &logs)))
}

/// `s^{-t}` for a strictly positive state and `0 < t ≤ 1`.
pub fn matrix_neg_power(s: &DensityOperator, t: f64) -> Result<HermitianOperator> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::new(
            MODULE,
            "matrix_neg_power",
            ErrorKind::InvalidParameter(format!("exponent t must lie in (0, 1], got {t}")),
        ));
    }
    let e = s.eigh()?;
    let min_eig = *e.values.last().expect("nonempty");
    if min_eig <= SUPPORT_EPS {
        return Err(Error::new(MODULE, "matrix_neg_power", ErrorKind::SingularState { min_eig }));
    }
    let powered: Vec<f64> = e.values.iter().map(|&v| v.powf(-t)).collect();
    Ok(HermitianOperator::from_matrix_unchecked(linalg::reconstruct(&e.vectors, &powered)))
}

/// Diagonal of `r` in the eigenbasis of `s`, paired with the (possibly
/// restricted) logarithms of the eigenvalues of `s`.
struct LogBasisView {
    weights: Vec<f64>,
    logs: Vec<f64>,
}

fn log_basis_view(r: &DensityOperator, s: &DensityOperator, mode: SupportMode, op: &'static str) -> Result<LogBasisView> {
    check_dims(s.dim(), r.dim(), op)?;
    let e = s.eigh()?;
    let rotated = e.vectors.adjoint() * r.matrix() * &e.vectors;
    let weights: Vec<f64> = (0..r.dim()).map(|i| rotated[(i, i)].re).collect();
    let min_eig = *e.values.last().expect("nonempty");
    let escaped: f64 = e
        .values
        .iter()
        .zip(&weights)
        .filter(|(&v, _)| v <= SUPPORT_EPS)
        .map(|(_, &w)| w.max(0.0))
        .sum();
    if escaped > SUPPORT_LEAK_TOL {
        return Err(Error::new(MODULE, op, ErrorKind::InfiniteDivergence { escaped_mass: escaped }));
    }
    let logs = e
        .values
        .iter()
        .map(|&v| scalar_log(v, mode, min_eig, op))
        .collect::<Result<Vec<_>>>()?;
    Ok(LogBasisView { weights, logs })
}

/// `-S(ρ) = Tr ρ log ρ` with the `0 log 0 = 0` convention.
pub fn neg_entropy(r: &DensityOperator) -> Result<f64> {
    Ok(r.eigh()?.values.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum())
}

/// `D(r‖s) = Tr r(log r − log s)` in nats.
pub fn relative_entropy(r: &DensityOperator, s: &DensityOperator) -> Result<f64> {
    relative_entropy_with(r, s, SupportMode::Strict)
}

pub fn relative_entropy_with(r: &DensityOperator, s: &DensityOperator, mode: SupportMode) -> Result<f64> {
    let view = log_basis_view(r, s, mode, "relative_entropy")?;
    let cross: f64 = view.weights.iter().zip(&view.logs).map(|(w, l)| w * l).sum();
    Ok(neg_entropy(r)? - cross)
}

/// `Tr r (log s − Tr r log s)²`.
pub fn relative_log_variance(r: &DensityOperator, s: &DensityOperator) -> Result<f64> {
    relative_log_variance_with(r, s, SupportMode::Strict)
}

pub fn relative_log_variance_with(r: &DensityOperator, s: &DensityOperator, mode: SupportMode) -> Result<f64> {
    // log s is diagonal in the eigenbasis of s, so only the diagonal of r there matters.
    let view = log_basis_view(r, s, mode, "relative_log_variance")?;
    let mean: f64 = view.weights.iter().zip(&view.logs).map(|(w, l)| w * l).sum();
    Ok(view.weights.iter().zip(&view.logs).map(|(w, l)| w * (l - mean).powi(2)).sum())
}

/// `Tr ρ log σ`.
pub fn cross_log_trace(r: &DensityOperator, s: &DensityOperator) -> Result<f64> {
    let view = log_basis_view(r, s, SupportMode::Strict, "cross_log_trace")?;
    Ok(view.weights.iter().zip(&view.logs).map(|(w, l)| w * l).sum())
}

/// `(α, β) = (Tr r(I − a), Tr s a)`.
pub fn test_errors(a: &TestOperator, r: &DensityOperator, s: &DensityOperator) -> Result<(f64, f64)> {
    check_dims(a.dim(), r.dim(), "test_errors")?;
    check_dims(a.dim(), s.dim(), "test_errors")?;
    let accept = a.operator().expectation(r.operator());
    let beta = a.operator().expectation(s.operator());
    Ok((1.0 - accept, beta))
}

/// `‖AB − BA‖_F`.
pub fn commutator_norm(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    let ab = a * b;
    let ba = b * a;
    linalg::frobenius(&(ab - ba))
}
