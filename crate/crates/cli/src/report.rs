//! Machine-readable output documents.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct AngleOut {
    pub name: String,
    pub radians: f64,
}

#[derive(Debug, Serialize)]
pub struct EntropyOut {
    pub s_rho_bits: f64,
    pub s_sets_bits: Vec<f64>,
    pub holevo_gap_bits: f64,
    pub bound_bits: f64,
    pub feasible: bool,
}

/// The `verify` report: POVM shape, residuals, and pass/fail. Residuals
/// are copied from the module reports without re-rounding.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub theta: Option<f64>,
    pub qubits: usize,
    pub states_per_qubit: usize,
    pub outcomes: usize,
    pub outcome_labels: Vec<String>,
    pub ranks: Vec<usize>,
    pub completeness_residual: f64,
    pub min_eigenvalue: f64,
    pub elimination_max_probability: f64,
    pub angles: Vec<AngleOut>,
    pub failure_probability: Option<f64>,
    pub failure_probability_direct: Option<f64>,
    pub entropy: Option<EntropyOut>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct StateSample {
    pub state: String,
    pub eliminated_outcome: String,
    pub counts: Vec<u64>,
    pub eliminated_count: u64,
    pub seed: u64,
}

/// The `sample` report: per-state outcome counts under a fixed seed.
#[derive(Debug, Serialize)]
pub struct SampleReport {
    pub scenario: String,
    pub theta: Option<f64>,
    pub shots: u64,
    pub base_seed: u64,
    pub outcome_labels: Vec<String>,
    pub states: Vec<StateSample>,
    pub pass: bool,
}
