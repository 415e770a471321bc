//! Dense complex matrix helpers shared by the operator types.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, ErrorKind, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: CMat,
}

pub fn eigh(m: &CMat) -> Result<Eigh> {
    let dim = m.nrows();
    if dim == 0 {
        return Ok(Eigh { values: vec![], vectors: CMat::zeros(0, 0) });
    }
    let herm = hermitian_part(m);
    let decomposed = SymmetricEigen::try_new(herm, f64::EPSILON, 1000 * dim.max(10)).ok_or_else(|| {
        Error::new(
            "operator_algebra",
            "eigh",
            ErrorKind::Computation(format!("Hermitian eigensolver did not converge (dim {dim})")),
        )
    })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| decomposed.eigenvalues[b].total_cmp(&decomposed.eigenvalues[a]));
    let values = order.iter().map(|&i| decomposed.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(dim, dim, |r, col| decomposed.eigenvectors[(r, order[col])]);
    Ok(Eigh { values, vectors })
}

/// Real symmetric eigenvalues/vectors, ascending. Used for small auxiliary problems.
pub fn eigh_real(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let dim = m.nrows();
    let decomposed = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| decomposed.eigenvalues[a].total_cmp(&decomposed.eigenvalues[b]));
    let values = order.iter().map(|&i| decomposed.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, col| decomposed.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from self-adjointness.
pub fn hermiticity_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real part of the trace of `a * b` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

/// `V diag(f(λ)) V†`.
pub fn reconstruct(vectors: &CMat, values: &[f64]) -> CMat {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    scaled * vectors.adjoint()
}

/// Projector `V V†` onto the span of the (orthonormal) columns of `basis`.
pub fn projector(basis: &CMat) -> CMat {
    basis * basis.adjoint()
}

/// Columns `cols` of `m`, as a new matrix.
pub fn select_columns(m: &CMat, cols: impl IntoIterator<Item = usize>) -> CMat {
    let cols: Vec<usize> = cols.into_iter().collect();
    CMat::from_fn(m.nrows(), cols.len(), |r, j| m[(r, cols[j])])
}

pub fn hstack(blocks: &[CMat], rows: usize) -> CMat {
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, total);
    let mut offset = 0;
    for b in blocks {
        out.view_mut((0, offset), (rows, b.ncols())).copy_from(b);
        offset += b.ncols();
    }
    out
}

/// Frobenius norm of `(I - VV†) X V`, the part of `X V` leaving span(V).
pub fn leakage(x: &CMat, basis: &CMat) -> f64 {
    let xv = x * basis;
    let inside = basis * (basis.adjoint() * &xv);
    frobenius(&(xv - inside))
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn real_diagonal(values: &[f64]) -> CMat {
    let n = values.len();
    CMat::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}
