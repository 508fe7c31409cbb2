//! Exact rational linear algebra: scalars, sparse matrices and vectors,
//! Kronecker products, and canonical echelon forms for subspaces.

mod echelon;
mod matrix;
mod rational;
mod subspace;
mod vector;

pub use matrix::{kron, unvectorize, vectorize, ExactMatrix};
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};
pub use subspace::{nullspace, rank, span_equal, SubspaceBasis};
pub use vector::{kron_vec, ExactVector};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch ({}x{} vs {}x{})", .left.0, .left.1, .right.0, .right.1)]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("subspaces live in different ambient spaces ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}
