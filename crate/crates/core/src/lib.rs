//! Bézier extraction, Bézier-projection dual bases and sparse B̄
//! formulations for locking-free isogeometric analysis of Timoshenko beams
//! and nearly incompressible plane-strain elasticity.

pub mod beam;
pub mod elasticity2d;
pub mod extraction;
pub mod geometry;
pub mod numerics;
pub mod projection;
pub mod rates;
pub mod splines;

use thiserror::Error;

/// Formulations compared throughout the studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    /// Standard displacement formulation.
    Standard,
    /// B̄ with the global L² projector (dense).
    GlobalBbar,
    /// Symmetric Bézier B̄.
    SymmetricBezier,
    /// Non-symmetric Bézier B̄ (condensed mixed form).
    NonSymmetricBezier,
}

impl Formulation {
    pub const ALL: [Formulation; 4] = [
        Formulation::Standard,
        Formulation::GlobalBbar,
        Formulation::SymmetricBezier,
        Formulation::NonSymmetricBezier,
    ];

    /// Label used in tables and CSV files.
    pub fn label(self) -> &'static str {
        match self {
            Formulation::Standard => "Q",
            Formulation::GlobalBbar => "T-L2",
            Formulation::SymmetricBezier => "S-TP",
            Formulation::NonSymmetricBezier => "NS-TP",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.label() == s)
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Spline(#[from] splines::SplineError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Extraction(#[from] extraction::ExtractionError),
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
