//! Numerical tolerances used across the crate.
//!
//! Two tiers: objects built directly from exact arithmetic (group tables,
//! representation matrices) are checked at [`CONSTRUCTION`]; objects derived
//! through sums, projections, or eigendecompositions are checked at
//! [`DERIVED`]. Rank and eigenvalue clamping decisions sit at [`RANK_EIG`],
//! well separated from the derived-object noise floor.

/// Residual bound for directly constructed objects (unitarity,
/// homomorphism, character orthogonality): exact arithmetic up to rounding.
pub const CONSTRUCTION: f64 = 1e-12;

/// Residual bound for derived objects (projector completeness, POVM
/// completeness, elimination probabilities).
pub const DERIVED: f64 = 1e-10;

/// Threshold on Hermitian eigenvalues for rank counting and 0/1 clamping.
pub const RANK_EIG: f64 = 1e-8;

/// Completeness residual above which `covariant_povm` refuses to return a
/// POVM (signals a bad seed or decomposition rather than rounding noise).
pub const COMPLETENESS_BUILD: f64 = 1e-8;

/// Residual bound for solver orthogonality conditions on their validity
/// grids.
pub const SOLVER_RESIDUAL: f64 = 1e-10;

/// Residual bound for the n-qubit phase condition (root find to 1e-12 in
/// beta leaves slightly more slack in the assembled condition).
pub const N_QUBIT_RESIDUAL: f64 = 1e-9;

/// Slack accepted at closed validity-interval boundaries before a scenario
/// is reported as having no exact solution.
pub const RANGE_BOUNDARY: f64 = 1e-12;
