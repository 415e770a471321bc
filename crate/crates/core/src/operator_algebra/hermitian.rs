use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ErrorKind, Result};
use crate::linalg::{self, c, CMat, CVec, Eigh};

const MODULE: &str = "operator_algebra";

/// Entrywise tolerance on `A - A†` accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Slack on eigenvalues and trace of density operators.
pub const STATE_TOL: f64 = 1e-10;

/// Dense complex self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMat,
}

impl HermitianOperator {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::new(
                MODULE,
                "HermitianOperator::new",
                ErrorKind::InvalidParameter(format!(
                    "expected a nonempty square matrix, got {}x{}",
                    entries.nrows(),
                    entries.ncols()
                )),
            ));
        }
        let deviation = linalg::hermiticity_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::new(MODULE, "HermitianOperator::new", ErrorKind::NotHermitian { deviation }));
        }
        Ok(Self::from_matrix_unchecked(entries))
    }

    /// Symmetrizes without validating. For matrices Hermitian by construction.
    pub(crate) fn from_matrix_unchecked(entries: CMat) -> Self {
        HermitianOperator { entries: linalg::hermitian_part(&entries) }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator { entries: linalg::identity(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator { entries: CMat::zeros(dim, dim) }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        HermitianOperator { entries: linalg::real_diagonal(values) }
    }

    /// Real symmetric matrix given row-major.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::new(
                MODULE,
                "HermitianOperator::from_real_rows",
                ErrorKind::InvalidParameter("rows must form a square matrix".into()),
            ));
        }
        Self::new(CMat::from_fn(n, n, |i, j| c(rows[i][j], 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigh(&self) -> Result<Eigh> {
        linalg::eigh(&self.entries)
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("nonempty"))
    }

    /// Functional calculus `f(X)` on the eigendecomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let e = self.eigh()?;
        let mapped: Vec<f64> = e.values.iter().map(|&v| f(v)).collect();
        Ok(Self::from_matrix_unchecked(linalg::reconstruct(&e.vectors, &mapped)))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HermitianOperator { entries: self.entries.map(|z| z * factor) }
    }

    /// `Tr(ρ X)` with ρ the argument.
    pub fn expectation(&self, rho: &HermitianOperator) -> f64 {
        linalg::trace_product(rho.matrix(), &self.entries)
    }

    /// `U X U†`.
    pub fn conjugated(&self, unitary: &CMat) -> Self {
        Self::from_matrix_unchecked(unitary * &self.entries * unitary.adjoint())
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        linalg::max_abs(&(&self.entries - &other.entries))
    }

    /// Frobenius distance, an upper bound for the operator-norm distance.
    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        linalg::frobenius(&(&self.entries - &other.entries))
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.entries)
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        Self::new(json.to_matrix()?)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { entries: &self.entries - &rhs.entries }
    }
}

/// Matrix product; generally not Hermitian, hence a raw matrix.
impl Mul for &HermitianOperator {
    type Output = CMat;
    fn mul(self, rhs: &HermitianOperator) -> CMat {
        &self.entries * &rhs.entries
    }
}

/// Positive semidefinite unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::new(
                MODULE,
                "DensityOperator::new",
                ErrorKind::NotDensity(format!("trace {trace} differs from 1")),
            ));
        }
        let min_eig = op.min_eigenvalue()?;
        if min_eig < -STATE_TOL {
            return Err(Error::new(
                MODULE,
                "DensityOperator::new",
                ErrorKind::NotDensity(format!("negative eigenvalue {min_eig:.3e}")),
            ));
        }
        Ok(DensityOperator { op })
    }

    pub fn from_matrix(entries: CMat) -> Result<Self> {
        Self::new(HermitianOperator::new(entries)?)
    }

    /// For operators that are states by construction (tensor products, conjugations).
    pub(crate) fn from_operator_unchecked(op: HermitianOperator) -> Self {
        DensityOperator { op }
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diagonal(probabilities))
    }

    /// `|ψ⟩⟨ψ|` for the normalized vector.
    pub fn pure(vector: &CVec) -> Result<Self> {
        let norm = vector.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::new(
                MODULE,
                "DensityOperator::pure",
                ErrorKind::InvalidParameter("state vector must be nonzero".into()),
            ));
        }
        let v = vector.unscale(norm);
        Ok(DensityOperator { op: HermitianOperator::from_matrix_unchecked(&v * v.adjoint()) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator { op: HermitianOperator::identity(dim).scaled(1.0 / dim as f64) }
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, unitary: &CMat) -> Self {
        DensityOperator { op: self.op.conjugated(unitary) }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn eigh(&self) -> Result<Eigh> {
        self.op.eigh()
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        Self::new(HermitianOperator::from_json(json)?)
    }
}

/// Operator with `0 ≤ A ≤ I`; acceptance probability of the null hypothesis is `Tr ρA`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOperator {
    op: HermitianOperator,
}

impl TestOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let values = op.eigenvalues()?;
        let max_eig = values[0];
        let min_eig = *values.last().expect("nonempty");
        if min_eig < -STATE_TOL || max_eig > 1.0 + STATE_TOL {
            return Err(Error::new(MODULE, "TestOperator::new", ErrorKind::NotTest { min_eig, max_eig }));
        }
        Ok(TestOperator { op })
    }

    pub(crate) fn from_operator_unchecked(op: HermitianOperator) -> Self {
        TestOperator { op }
    }

    pub fn identity(dim: usize) -> Self {
        TestOperator { op: HermitianOperator::identity(dim) }
    }

    pub fn zero(dim: usize) -> Self {
        TestOperator { op: HermitianOperator::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }
}

/// Matrix exchange format: `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let n = m.nrows();
        MatrixJson {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.dim;
        let bad = |what: &str| {
            Error::new(MODULE, "MatrixJson::to_matrix", ErrorKind::Parse(format!("{what} must be {n}x{n}")))
        };
        if n == 0 || self.re.len() != n || self.re.iter().any(|r| r.len() != n) {
            return Err(bad("re"));
        }
        let has_im = !self.im.is_empty();
        if has_im && (self.im.len() != n || self.im.iter().any(|r| r.len() != n)) {
            return Err(bad("im"));
        }
        Ok(CMat::from_fn(n, n, |i, j| c(self.re[i][j], if has_im { self.im[i][j] } else { 0.0 })))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::new(MODULE, "MatrixJson::parse", ErrorKind::Parse(e.to_string())))
    }
}
