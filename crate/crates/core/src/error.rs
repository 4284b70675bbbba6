//! Error type shared by all modules.

use thiserror::Error;

/// Errors from group construction, representation decomposition, POVM
/// assembly, the scenario solvers, and the entropy machinery.
#[derive(Debug, Clone, Error)]
pub enum QelimError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),

    /// The decomposition found an irreducible representation appearing more
    /// than once; the covariant construction assumes multiplicity <= 1.
    #[error("irrep multiplicity above one: {0}")]
    MultiplicityViolation(String),

    #[error("seed norm condition violated: {0}")]
    SeedNormViolation(String),

    #[error("POVM completeness failure: residual {residual:.3e} exceeds {tolerance:.1e}")]
    CompletenessFailure { residual: f64, tolerance: f64 },

    #[error("invalid coset partition: {0}")]
    InvalidPartition(String),

    /// The requested theta lies outside the scenario's exact validity range.
    #[error("no exact solution at theta = {theta:.6}: {reason}")]
    NoExactSolution { theta: f64, reason: String },

    /// The failure-POVM solver was called where the exact solver applies.
    #[error("theta = {theta:.6} is in the exact regime; use the exact solver")]
    ExactRegime { theta: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
}

pub type Result<T> = std::result::Result<T, QelimError>;
