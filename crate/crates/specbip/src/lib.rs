//! Spectral bipartization of undirected weighted graphs.
//!
//! Given a graph whose adjacency matrix is (approximately) that of a bipartite
//! graph under some unknown node ordering, this crate estimates the two vertex
//! set cardinalities from the eigenvalue spectrum, finds a node permutation
//! that exposes the bipartite block structure, and builds the nearest
//! structured bipartite approximation of the adjacency matrix. The same
//! machinery detects a large anti-community (a node set with almost no
//! internal edges), since such a set produces the same zero-eigenvalue
//! structure.
//!
//! The crate is organized around the pipeline stages:
//!
//! - [`graph`]: graph representation, permutations, components, frustration.
//! - [`io`]: Pajek / Matrix Market / TSV edge-list readers and writers.
//! - [`linalg`]: dense symmetric eigendecomposition, SVD, and the nearest
//!   orthonormal-matrix (Procrustes) kernel.
//! - [`bipartize`]: the bipartization pipeline and anti-community detection.
//! - [`metrics`]: bipartivity index and quality indices.
//! - [`redblack`]: BFS parity two-coloring baseline.
//! - [`testgen`]: seeded random test-graph generation.
//! - [`bench`]: benchmark manifests and the CSV-producing harness.
//! - [`plotdata`]: spectrum and sparsity-pattern plot data.
//!
//! See the `examples/` directory for one runnable program per capability, and
//! the `specbip` binary for the command-line frontend.

use thiserror::Error;

pub mod bench;
pub mod bipartize;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod plotdata;
pub mod redblack;
pub mod testgen;

pub use bipartize::{
    bipartize, detect_anticommunity, AntiCommunity, Bipartization, BipartizeOptions,
    CardinalityEstimate, RoundingMode,
};
pub use graph::{ComponentDecomposition, Graph, NodePermutation, Partition};
pub use linalg::{SpectralFactorization, SvdFactorization};
pub use metrics::QualityReport;
pub use testgen::TestSpec;

/// Errors produced by graph loading, numerical kernels, and the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("unknown format: {0}")]
    UnknownFormat(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("graph is disconnected; split it with connected_components or pass --component=largest")]
    Disconnected,

    #[error("graph must have at least {min} nodes, got {got}")]
    GraphTooSmall { min: usize, got: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigensolver failed to converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("ground-truth cross block has no nonzero entries")]
    EmptyCrossBlock,

    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
