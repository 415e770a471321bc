use crate::error::{Error, ErrorKind, Result};
use crate::linalg::{self, CMat};

use super::hermitian::{DensityOperator, HermitianOperator};

const MODULE: &str = "operator_algebra";

pub const PVM_TOL: f64 = 1e-9;
pub const REFINEMENT_TOL: f64 = 1e-8;
pub const PROBABILITY_CLIP: f64 = 1e-12;

/// Projection-valued measure.
///
/// Each element is stored as an isometry whose columns span the range of the
/// projector, so that `P_i = V_i V_i†`. Rank-one refinements of large tensor
/// powers stay at `dim²` storage this way.
#[derive(Debug, Clone)]
pub struct Pvm {
    dim: usize,
    bases: Vec<CMat>,
    labels: Vec<String>,
}

impl Pvm {
    /// Validates that the stacked bases form a unitary, which gives
    /// idempotency, orthogonality and completeness at once.
    pub fn from_bases(bases: Vec<CMat>, labels: Vec<String>) -> Result<Self> {
        let pvm = Self::from_bases_unchecked(bases, labels)?;
        let stacked = pvm.stacked();
        if stacked.ncols() != pvm.dim {
            return Err(invalid(format!("element ranks sum to {}, expected {}", stacked.ncols(), pvm.dim)));
        }
        let gram = stacked.adjoint() * &stacked;
        let deviation = linalg::max_abs(&(gram - linalg::identity(pvm.dim)));
        if deviation > PVM_TOL {
            return Err(invalid(format!(
                "elements are not orthogonal projectors summing to identity (deviation {deviation:.3e})"
            )));
        }
        Ok(pvm)
    }

    pub(crate) fn from_bases_unchecked(bases: Vec<CMat>, labels: Vec<String>) -> Result<Self> {
        let Some(first) = bases.first() else {
            return Err(invalid("a PVM needs at least one element".into()));
        };
        let dim = first.nrows();
        if labels.len() != bases.len() {
            return Err(invalid(format!("{} labels for {} elements", labels.len(), bases.len())));
        }
        if let Some(b) = bases.iter().find(|b| b.nrows() != dim || b.ncols() == 0) {
            return Err(invalid(format!("element basis has shape {}x{}", b.nrows(), b.ncols())));
        }
        Ok(Pvm { dim, bases, labels })
    }

    /// Builds the PVM from dense projectors.
    pub fn from_projectors(projectors: &[HermitianOperator], labels: Vec<String>) -> Result<Self> {
        let mut bases = Vec::with_capacity(projectors.len());
        for (i, p) in projectors.iter().enumerate() {
            let e = p.eigh()?;
            let off = e.values.iter().map(|&v| v.abs().min((v - 1.0).abs())).fold(0.0, f64::max);
            if off > PVM_TOL {
                return Err(invalid(format!("element {i} is not idempotent (spectral deviation {off:.3e})")));
            }
            let rank = e.values.iter().filter(|&&v| v > 0.5).count();
            if rank == 0 {
                return Err(invalid(format!("element {i} is the zero projector")));
            }
            bases.push(linalg::select_columns(&e.vectors, 0..rank));
        }
        Self::from_bases(bases, labels)
    }

    /// One rank-one element per column of a unitary.
    pub fn from_unitary_columns(u: &CMat) -> Result<Self> {
        let bases = (0..u.ncols()).map(|j| linalg::select_columns(u, [j])).collect();
        let labels = (0..u.ncols()).map(|j| j.to_string()).collect();
        Self::from_bases(bases, labels)
    }

    pub fn computational_basis(dim: usize) -> Self {
        Self::from_unitary_columns(&linalg::identity(dim)).expect("identity is unitary")
    }

    /// `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Pvm { dim, bases: vec![linalg::identity(dim)], labels: vec!["I".into()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn basis(&self, i: usize) -> &CMat {
        &self.bases[i]
    }

    pub fn bases(&self) -> &[CMat] {
        &self.bases
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self, i: usize) -> usize {
        self.bases[i].ncols()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.ncols()).collect()
    }

    /// `w(E)`: the largest element rank.
    pub fn max_rank(&self) -> usize {
        self.bases.iter().map(|b| b.ncols()).max().unwrap_or(0)
    }

    pub fn is_rank_one(&self) -> bool {
        self.max_rank() == 1
    }

    pub fn projector(&self, i: usize) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(linalg::projector(&self.bases[i]))
    }

    /// All element bases side by side; a unitary for a valid PVM.
    pub fn stacked(&self) -> CMat {
        linalg::hstack(&self.bases, self.dim)
    }

    /// Largest `‖[P_i, X]‖_F` over the elements.
    pub fn max_commutator_norm(&self, x: &HermitianOperator) -> f64 {
        self.bases
            .iter()
            .map(|b| std::f64::consts::SQRT_2 * linalg::leakage(x.matrix(), b))
            .fold(0.0, f64::max)
    }
}

fn invalid(why: String) -> Error {
    Error::new(MODULE, "Pvm", ErrorKind::InvalidPvm(why))
}

fn check_dims(expected: usize, found: usize, op: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::new(MODULE, op, ErrorKind::DimensionMismatch { expected, found }));
    }
    Ok(())
}

/// Probabilities of a PVM's outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub probabilities: Vec<f64>,
    pub labels: Vec<String>,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Eigenvalues (descending) with the PVM of their eigenspaces.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Pvm,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> HermitianOperator {
        let dim = self.projectors.dim();
        let mut acc = CMat::zeros(dim, dim);
        for (b, &v) in self.projectors.bases().iter().zip(&self.eigenvalues) {
            acc += linalg::projector(b).scale(v);
        }
        HermitianOperator::from_matrix_unchecked(acc)
    }
}

/// Spectral PVM `E(X)`; eigenvalues closer than `degeneracy_tol` times the
/// spectral range are merged into one projector.
pub fn spectral(x: &HermitianOperator, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    if degeneracy_tol.is_nan() || degeneracy_tol <= 0.0 {
        return Err(Error::new(
            MODULE,
            "spectral",
            ErrorKind::InvalidParameter(format!("degeneracy_tol must be positive, got {degeneracy_tol}")),
        ));
    }
    let e = x.eigh()?;
    let clusters = cluster_descending(&e.values, degeneracy_tol);
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut bases = Vec::with_capacity(clusters.len());
    for range in &clusters {
        let members = &e.values[range.clone()];
        eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
        bases.push(linalg::select_columns(&e.vectors, range.clone()));
    }
    let labels = (0..bases.len()).map(|i| format!("e{i}")).collect();
    Ok(SpectralDecomposition { eigenvalues, projectors: Pvm::from_bases_unchecked(bases, labels)? })
}

/// Groups a descending sequence into runs whose consecutive gaps do not exceed
/// `relative_tol` times the total range (or `relative_tol` itself for a flat spectrum).
pub(crate) fn cluster_descending(values: &[f64], relative_tol: f64) -> Vec<std::ops::Range<usize>> {
    if values.is_empty() {
        return vec![];
    }
    let range = values[0] - values[values.len() - 1];
    let threshold = if range > 0.0 { relative_tol * range } else { relative_tol };
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i - 1] - values[i] > threshold {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..values.len());
    out
}

/// Pinching map `X ↦ Σ E_i X E_i`.
pub fn pinch(e: &Pvm, x: &HermitianOperator) -> Result<HermitianOperator> {
    check_dims(e.dim(), x.dim(), "pinch")?;
    let mut acc = CMat::zeros(x.dim(), x.dim());
    for b in e.bases() {
        let inner = b.adjoint() * x.matrix() * b;
        acc += b * inner * b.adjoint();
    }
    Ok(HermitianOperator::from_matrix_unchecked(acc))
}

/// True iff `m ≥ e`: every element of `e` is a sum of elements of `m`.
pub fn refines(m: &Pvm, e: &Pvm) -> bool {
    if m.dim() != e.dim() {
        return false;
    }
    // With W = [V_1 … V_r] unitary, element B of m splits as Σ_i V_i (V_i† B);
    // B lies inside E_i iff all the other pieces vanish.
    let overlaps = e.stacked().adjoint() * m.stacked();
    let mut row_offsets = Vec::with_capacity(e.len());
    let mut off = 0;
    for r in e.ranks() {
        row_offsets.push(off..off + r);
        off += r;
    }
    let mut assigned_rank = vec![0usize; e.len()];
    let mut col = 0;
    for j in 0..m.len() {
        let cols = col..col + m.rank(j);
        col += m.rank(j);
        let piece_sq: Vec<f64> = row_offsets
            .iter()
            .map(|rows| {
                rows.clone()
                    .flat_map(|r| cols.clone().map(move |c| (r, c)))
                    .map(|(r, c)| overlaps[(r, c)].norm_sqr())
                    .sum()
            })
            .collect();
        let total: f64 = piece_sq.iter().sum();
        let owner = (0..e.len()).max_by(|&a, &b| piece_sq[a].total_cmp(&piece_sq[b])).expect("nonempty");
        let outside = (total - piece_sq[owner]).max(0.0).sqrt();
        if outside > REFINEMENT_TOL {
            return false;
        }
        assigned_rank[owner] += m.rank(j);
    }
    assigned_rank == e.ranks()
}

/// Product PVM `F × E = {F_j E_i}` of commuting PVMs, zero products dropped.
pub fn pvm_product(f: &Pvm, e: &Pvm) -> Result<Pvm> {
    check_dims(f.dim(), e.dim(), "pvm_product")?;
    let mut worst = 0.0_f64;
    let mut bases = Vec::new();
    let mut labels = Vec::new();
    for (j, fb) in f.bases().iter().enumerate() {
        for (i, eb) in e.bases().iter().enumerate() {
            let overlap = fb.adjoint() * eb;
            if linalg::frobenius(&overlap) <= 1e-14 {
                continue;
            }
            // ‖[F_j, E_i]‖_F = √2 ‖(I - E_i) F_j V_i‖_F.
            let gram = overlap.adjoint() * &overlap;
            let leak = fb * &overlap - eb * &gram;
            worst = worst.max(std::f64::consts::SQRT_2 * linalg::frobenius(&leak));
            let inner = linalg::eigh(&gram)?;
            let rank = inner.values.iter().filter(|&&v| v > 0.5).count();
            if rank == 0 {
                continue;
            }
            bases.push(eb * linalg::select_columns(&inner.vectors, 0..rank));
            labels.push(format!("{}*{}", f.labels()[j], e.labels()[i]));
        }
    }
    if worst > PVM_TOL {
        return Err(Error::new(MODULE, "pvm_product", ErrorKind::NonCommuting { norm: worst }));
    }
    Pvm::from_bases(bases, labels)
}

/// Outcome distribution `P(i) = Tr M_i ρ`.
pub fn measure(s: &DensityOperator, m: &Pvm) -> Result<OutcomeDistribution> {
    check_dims(m.dim(), s.dim(), "measure")?;
    let mut probabilities = Vec::with_capacity(m.len());
    for (i, b) in m.bases().iter().enumerate() {
        let p = (b.adjoint() * s.matrix() * b).trace().re;
        if p < -PROBABILITY_CLIP {
            return Err(Error::new(
                MODULE,
                "measure",
                ErrorKind::Computation(format!("outcome {i} has negative probability {p:.3e}")),
            ));
        }
        probabilities.push(p.max(0.0));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > PVM_TOL {
        return Err(Error::new(
            MODULE,
            "measure",
            ErrorKind::Computation(format!("outcome probabilities sum to {total}")),
        ));
    }
    Ok(OutcomeDistribution { probabilities, labels: m.labels().to_vec() })
}
