//! Truncated-Taylor discretization of the differentiated functional
//! equations, the realified eigenproblem `lambda phi = (I - A)^{-1} B phi`,
//! and reconstruction of the potentials from an eigenfield.

mod field;
mod operators;
mod potentials;
mod spectrum;

pub use field::TaylorField;
pub use operators::{
    apply_a, apply_b, assemble, assemble_adaptive, Applied, AssemblyStats, Projector,
    RealifiedOperator,
};
pub use potentials::{recover_constants, Potentials};
pub use spectrum::{
    functional_residual, solve_at_degree, solve_spectrum, transfer_matrix, Candidate,
    CandidateReason, CauchyStep, Diagnostics, EigenResult, SolverOptions, Spectrum,
};
