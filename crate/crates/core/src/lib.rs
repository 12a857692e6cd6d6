//! Two-party correlation experiments as cut polytopes and elliptopes.

pub mod error;
pub mod graphs;
pub mod inequalities;
pub mod mappings;
pub mod polyhedra;
pub mod scalar;
pub mod sdp;

pub use error::{Error, ErrorKind, Result};
pub use graphs::{BipartiteShape, CompleteShape, GraphShape, Node, Shape, SuspensionShape};
pub use scalar::{Rational, Scalar};
