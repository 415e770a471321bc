//! Dense Hermitian operator arithmetic: states, tests, PVMs, the pinching map,
//! matrix functions and relative entropies. All logarithms are natural.

mod functions;
mod hermitian;
mod pvm;

pub use functions::{
    commutator_norm, cross_log_trace, kron_power, matrix_log, matrix_neg_power, neg_entropy, relative_entropy,
    relative_entropy_with, relative_log_variance, relative_log_variance_with, tensor_power, tensor_power_operator,
    test_errors, SupportMode, SUPPORT_EPS, SUPPORT_LEAK_TOL,
};
pub use hermitian::{DensityOperator, HermitianOperator, MatrixJson, TestOperator, HERMITIAN_TOL, STATE_TOL};
pub use pvm::{
    measure, pinch, pvm_product, refines, spectral, OutcomeDistribution, Pvm, SpectralDecomposition, PROBABILITY_CLIP,
    PVM_TOL, REFINEMENT_TOL,
};
pub(crate) use pvm::cluster_descending;

#[cfg(test)]
mod tests;
