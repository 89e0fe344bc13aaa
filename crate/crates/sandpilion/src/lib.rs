//! Exact computation of spanning-tree numbers, sandpile groups, and minimal
//! generator counts for cones over coconut trees, bi-coconut trees, and left
//! comb trees.
//!
//! Everything is computed in arbitrary-precision integer arithmetic: graph
//! Laplacians, fraction-free determinants, Smith normal forms, and lattice
//! membership tests. Closed-form values (Fibonacci-style recurrences,
//! generating-function coefficients, group-structure predictions) are kept
//! strictly separate from the matrix-based computations so that each side can
//! serve as an independent check on the other, with brute-force spanning-tree
//! enumeration as a third referee.
//!
//! Module map:
//! - [`graph`]: labeled multigraphs, the tree family builders, and the cone
//!   constructions.
//! - [`linalg`]: dense big-integer matrices — determinant, Smith normal form,
//!   lattice membership, minors.
//! - [`sandpile`]: Laplacians, spanning-tree counts, sandpile groups, leaf
//!   generator tests, comb minor claims.
//! - [`formulas`]: all closed forms and the group-structure predictor.
//! - [`relations`]: the relation matrices presenting the sandpile group of a
//!   coned bi-coconut tree, and their verification against the Laplacian.
//! - [`oracle`]: brute-force and deletion-contraction spanning-tree counters.

#![forbid(unsafe_code)]

pub mod formulas;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod relations;
pub mod sandpile;

use graph::VertexLabel;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph already contains a cone apex")]
    ApexPresent,
    #[error("vertex {0} not found in graph")]
    VertexNotFound(VertexLabel),
    #[error("vertex {0} is not a leaf")]
    NotALeaf(VertexLabel),
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
