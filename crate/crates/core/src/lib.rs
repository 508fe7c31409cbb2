//! Exact computation of the A-like matrices of a finite graph.
//!
//! A square matrix `B` indexed by the vertices of a graph is *A-like* when it
//! commutes with the adjacency matrix `A` and vanishes at every pair of
//! vertices that are neither equal nor adjacent. This crate computes that space
//! for small graphs by exact constraint solving, and for the hypercube `Q_D`
//! builds explicit bases of its symmetric part (dimension `D + 1`) and its
//! antisymmetric part (dimension `C(D, 2)`), together with a verification suite
//! for every identity those bases rest on.
//!
//! All arithmetic is over arbitrary-precision rationals.

pub mod alike;
pub mod cli;
pub mod exactlinalg;
pub mod format;
pub mod graph;
pub mod hypercube;
pub mod parallel;
pub mod verify;

pub use alike::{
    bij_action_on_ws, characterization_residual, closed_form_antisym_basis, closed_form_sym_basis,
    is_alike, restriction_to_e1, solve_alike, AlikeCheck, AlikeDecomposition, AlikeError,
    SignedSubset, SupportPattern,
};
pub use exactlinalg::{
    kron, kron_vec, nullspace, rank, span_equal, unvectorize, vectorize, ExactMatrix, ExactVector,
    LinalgError, Rational, SubspaceBasis,
};
pub use graph::{DistanceRegularity, Graph, GraphError};
pub use hypercube::{hypercube, EigenData, EigenSpace, HypercubeContext, ScaledEigenvector};
pub use parallel::Execution;
pub use verify::{verify_all, CheckGroup, GroupReport, GroupStatus, VerifyOptions, VerifyReport};
