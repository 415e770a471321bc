//! Numerical laboratory for quantum hypothesis testing in the Stein regime.
//!
//! The crate builds the Schur–Weyl block PVM of `H^{⊗n}`, refines it with the
//! spectral PVM of `σ^{⊗n}` into a rank-one measurement, and compares the
//! resulting classical tests against the exact quantum Neyman–Pearson optimum.
//! Supporting modules cover information-spectrum threshold tests, operator
//! inequalities for pinched states and bosonic Gaussian discrimination in a
//! truncated Fock space.
//!
//! All logarithms are natural; exponents are reported in nats per copy.

pub mod error;
pub mod gaussian;
pub mod hypothesis_testing;
pub mod inequalities;
pub mod info_spectrum;
pub mod limits;
pub mod linalg;
pub mod measurement_design;
pub mod numerics;
pub mod operator_algebra;
pub mod random;
pub mod schur_weyl;

pub use error::{Error, ErrorKind, Result};
