//! Exact-arithmetic Pauli and Dirac matrix machinery for the Lévy-Leblond
//! linearization of the Schrödinger operator.

mod dirac;
mod exact;
mod matrix;
mod report;

pub use dirac::{
    check_dirac_algebra, check_linearization_conditions, dirac_rep, dirac_rep_with_sign,
    fifth_matrix, pauli, sigma_dot, sigma_dot_f64, symbol_square_residual, theta_symbol,
    DiracRep, ISign, RepKind,
};
pub use exact::ExactComplex;
pub use matrix::{anticommutator, block, commutator, kron, Matrix, Matrix2, Matrix4};
pub use report::{Condition, ConditionReport, Residual};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("Pauli index {0} out of range 1..=3")]
    PauliIndex(usize),
    #[error("the constant a must be nonzero")]
    ZeroA,
    #[error("custom representations must be built with DiracRep::from_matrices")]
    CustomKind,
    #[error("input matrices do not form a Dirac set: {0} fails")]
    NotDiracSet(String),
}

/// The parameter sweep used by the verification suite.
pub fn a_sweep() -> Vec<ExactComplex> {
    vec![
        ExactComplex::real(1, 2),
        ExactComplex::real(-1, 2),
        ExactComplex::imag(1, 2),
        ExactComplex::imag(-1, 2),
        ExactComplex::real(1, 1),
        ExactComplex::real(-1, 1),
        ExactComplex::real(3, 7),
    ]
}
