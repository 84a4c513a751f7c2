//! Quadrature, sparse containers, direct solvers and eigenvalue support.

pub mod linalg;
pub mod quadrature;
pub mod sparse;

pub use linalg::{
    bandwidth, block_bandwidth, generalized_eigenvalues, relative_residual, smallest_nonzero_gen_eig, solve, solve_constrained,
    solve_dense, BandedLu, BandwidthStats, Symmetry,
};
pub use quadrature::{gauss_rule, QuadratureRule};
pub use sparse::{AssemblyMap, CsrMatrix, TripletMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("Gauss rule with {requested} points requested; supported range is 1..={max}")]
    QuadratureOrder { requested: usize, max: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    Dimension {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is singular to working precision: pivot {pivot_index} has relative size {pivot_ratio:e}")]
    Singular { pivot_index: usize, pivot_ratio: f64 },
    #[error("solution residual {relative:e} exceeds tolerance")]
    Residual { relative: f64 },
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("no eigenvalue above the zero threshold")]
    NoNonzeroEigenvalue,
}
