use std::fmt;

use thiserror::Error;

/// Failure raised by any operation in the crate.
///
/// Every error carries the module and operation that produced it so that
/// messages surfaced by the runner can be traced without a backtrace.
#[derive(Debug, Clone, Error)]
#[error("{module}::{op}: {kind}")]
pub struct Error {
    pub module: &'static str,
    pub op: &'static str,
    pub kind: ErrorKind,
}

impl Error {
    pub fn new(module: &'static str, op: &'static str, kind: ErrorKind) -> Self {
        Error { module, op, kind }
    }

    /// True for input or configuration problems, as opposed to numeric failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self.kind,
            ErrorKind::Parse(_)
                | ErrorKind::InvalidParameter(_)
                | ErrorKind::DimensionMismatch { .. }
                | ErrorKind::NotHermitian { .. }
                | ErrorKind::NotDensity(_)
                | ErrorKind::NotTest { .. }
                | ErrorKind::InvalidPvm(_)
                | ErrorKind::IndexOutOfRange { .. }
                | ErrorKind::Precondition(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ErrorKind {
    DimensionMismatch { expected: usize, found: usize },
    DimensionCap { requested: u128, cap: usize },
    NotHermitian { deviation: f64 },
    NotDensity(String),
    NotTest { min_eig: f64, max_eig: f64 },
    InvalidPvm(String),
    SingularState { min_eig: f64 },
    /// Support of the first argument is not contained in the support of the second.
    InfiniteDivergence { escaped_mass: f64 },
    NonCommuting { norm: f64 },
    DegenerateCoefficients,
    ClusteringAmbiguous { attempts: usize },
    DecompositionInvalid(String),
    IndexOutOfRange { index: usize, bound: usize },
    InvalidParameter(String),
    IdentityNotApplicable(String),
    Cutoff { deficit: f64, suggested: usize },
    Precondition(String),
    Computation(String),
    Parse(String),
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ErrorKind::*;
        match self {
            DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            DimensionCap { requested, cap } => write!(
                f,
                "dimension {requested} exceeds the dimension cap {cap} (override with STEINLAB_DIM_CAP)"
            ),
            NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:.3e})")
            }
            NotDensity(why) => write!(f, "not a density operator: {why}"),
            NotTest { min_eig, max_eig } => write!(
                f,
                "not a test operator: spectrum [{min_eig:.3e}, {max_eig:.3e}] leaves [0, 1]"
            ),
            InvalidPvm(why) => write!(f, "invalid PVM: {why}"),
            SingularState { min_eig } => write!(
                f,
                "state is singular (smallest eigenvalue {min_eig:.3e}); use support-restricted mode"
            ),
            InfiniteDivergence { escaped_mass } => write!(
                f,
                "divergence is infinite: mass {escaped_mass:.3e} lies outside the reference support"
            ),
            NonCommuting { norm } => write!(f, "operators do not commute (commutator norm {norm:.3e})"),
            DegenerateCoefficients => write!(f, "coefficients must be pairwise distinct and nonzero"),
            ClusteringAmbiguous { attempts } => write!(
                f,
                "eigenvalue clustering stayed ambiguous after {attempts} coefficient draws"
            ),
            DecompositionInvalid(why) => write!(f, "decomposition failed validation: {why}"),
            IndexOutOfRange { index, bound } => write!(f, "index {index} out of range (bound {bound})"),
            InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            IdentityNotApplicable(why) => write!(f, "variance identity not applicable: {why}"),
            Cutoff { deficit, suggested } => write!(
                f,
                "Fock cutoff too small (trace deficit {deficit:.3e}); try cutoff {suggested}"
            ),
            Precondition(why) => write!(f, "precondition violated: {why}"),
            Computation(why) => write!(f, "computation failed: {why}"),
            Parse(why) => write!(f, "parse error: {why}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
