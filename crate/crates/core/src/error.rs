use thiserror::Error;

use crate::graphs::Node;

/// Errors raised by the library. Every variant maps onto one of the CLI's
/// exit classes through [`Error::kind`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("non-edge: {0} and {1} are not adjacent in {2}")]
    NonEdge(Node, Node, String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not in the image of iota: {0}")]
    NoSignaling(String),

    #[error("too large to enumerate: {0}")]
    TooLarge(String),

    #[error("degenerate input: the points span an affine subspace cut out by {} equation(s)", equations.len())]
    Degenerate { equations: Vec<crate::polyhedra::LinearEquation> },

    #[error("unbounded polyhedron: {0}")]
    Unbounded(String),

    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    #[error("solver did not converge after {iterations} iterations (primal {primal:.9}, dual {dual:.9})")]
    NonConvergence { iterations: usize, primal: f64, dual: f64 },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Guard,
    Parse,
    Solver,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::TooLarge(_) => ErrorKind::Guard,
            Error::Parse(_) => ErrorKind::Parse,
            Error::NonConvergence { .. } | Error::Numerical(_) => ErrorKind::Solver,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
