//! Closed-form and numerical solvers for the seed-vector phases of each
//! supported scenario, plus assembly of ready-to-verify scenario bundles.
//!
//! Every solver returns a [`PhaseSolution`]: one phase per invariant-
//! subspace basis vector, so the covariant seed is
//! `X = (1/sqrt|G|) sum_i e^{i phi_i} |b_i>`. Validity ranges are closed
//! intervals in theta; evaluation exactly on a boundary is accepted, with
//! the residual tolerances doing the final gating.

use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{QelimError, Result};
use crate::group::{FiniteGroup, GroupElement, Subgroup};
use crate::linalg::{self, CMat, CVec};
use crate::povm::{
    build_seed, covariant_povm, merge_by_cosets, EliminationScenario, Povm, PovmElement, SeedVector,
};
use crate::repr::{character_table, decompose, IrrepDecomposition, UnitaryRepresentation};
use crate::tol;

const PI: f64 = std::f64::consts::PI;

/// The scenarios this crate can construct end to end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Single-qubit trine elimination over Z3.
    Trine,
    /// Six two-qubit product states over D3.
    D3,
    /// Single-state elimination of the four states |±θ>|±θ>.
    TwoQubit,
    /// Pair elimination for three qubits (rank-two merged outcomes).
    ThreeQubitPairs,
    /// Quadruple elimination for four qubits (rank-four merged outcomes).
    FourQubitQuads,
    /// Single-state elimination for n qubits.
    NQubit,
    /// Two qubits below the exact threshold, with an inconclusive outcome.
    FailureTwoQubit,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Trine => "trine",
            ScenarioKind::D3 => "d3",
            ScenarioKind::TwoQubit => "two_qubit",
            ScenarioKind::ThreeQubitPairs => "three_qubit_pairs",
            ScenarioKind::FourQubitQuads => "four_qubit_quads",
            ScenarioKind::NQubit => "n_qubit",
            ScenarioKind::FailureTwoQubit => "failure_two_qubit",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = QelimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trine" => Ok(ScenarioKind::Trine),
            "d3" => Ok(ScenarioKind::D3),
            "two_qubit" => Ok(ScenarioKind::TwoQubit),
            "three_qubit_pairs" => Ok(ScenarioKind::ThreeQubitPairs),
            "four_qubit_quads" => Ok(ScenarioKind::FourQubitQuads),
            "n_qubit" => Ok(ScenarioKind::NQubit),
            "failure_two_qubit" => Ok(ScenarioKind::FailureTwoQubit),
            other => Err(QelimError::InvalidParameter(format!(
                "unknown scenario '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Seed phases for one scenario: named solution angles plus the phase of
/// each invariant-subspace basis vector, in decomposition block order.
#[derive(Debug, Clone)]
pub struct PhaseSolution {
    pub kind: ScenarioKind,
    pub theta: Option<f64>,
    pub qubits: usize,
    /// Named angles of the ansatz, e.g. ("phi", ...), ("alpha", ...).
    pub angles: Vec<(String, f64)>,
    /// Seed phase per basis vector; the amplitude is `e^{i phi} / sqrt|G|`.
    pub basis_phases: Vec<f64>,
    /// Closed validity interval in theta.
    pub theta_range: (f64, f64),
}

impl PhaseSolution {
    pub fn angle(&self, name: &str) -> Option<f64> {
        self.angles.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// The inconclusive-outcome data for two qubits below the exact threshold:
/// seed coefficients, the failure element `Pi_f = I - sum_g Pi_g`, and the
/// failure probability.
#[derive(Debug, Clone)]
pub struct FailurePovm {
    /// c_00, c_01, c_10, c_11 in computational order.
    pub coefficients: Vec<Complex64>,
    pub failure_element: CMat,
    pub failure_probability: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..PI / 2.0).contains(&theta) {
        return Err(QelimError::InvalidParameter(format!(
            "theta = {theta} outside [0, pi/2)"
        )));
    }
    Ok(())
}

/// Clamp an arccos argument that sits on the interval boundary up to
/// rounding.
fn safe_acos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

/// The product state `|±θ> ⊗ ... ⊗ |±θ>` with `|+θ> = cosθ|0> + sinθ|1>`;
/// `signs[j] = true` selects `|-θ>` on qubit j.
pub fn fiducial_state(theta: f64, signs: &[bool]) -> CVec {
    let (c, s) = (theta.cos(), theta.sin());
    let mut v = CVec::from_vec(vec![Complex64::new(1.0, 0.0)]);
    for &minus in signs {
        let q = [
            Complex64::new(c, 0.0),
            Complex64::new(if minus { -s } else { s }, 0.0),
        ];
        let mut next = CVec::zeros(v.len() * 2);
        for i in 0..v.len() {
            next[2 * i] = v[i] * q[0];
            next[2 * i + 1] = v[i] * q[1];
        }
        v = next;
    }
    v
}

/// Trine phases (0, π) on the rotation eigenvectors |u_+>, |u_->; the seed
/// is `i sqrt(2/3) |1>` up to global phase.
pub fn solve_trine() -> PhaseSolution {
    PhaseSolution {
        kind: ScenarioKind::Trine,
        theta: None,
        qubits: 1,
        angles: vec![("phi_plus".into(), 0.0), ("phi_minus".into(), PI)],
        basis_phases: vec![0.0, PI],
        theta_range: (0.0, 0.0),
    }
}

/// Solves `e^{i alpha} + (1 + e^{i beta} tanθ)^n - 1 = 0` for n qubits:
/// beta is the bracketed bisection root of
/// `|1 - (1 + e^{i beta} tanθ)^n| = 1` on [0, π], then
/// `alpha = arg[1 - (1 + e^{i beta} tanθ)^n]`. Solvable for
/// `arctan(2^{1/n} - 1) <= θ <= π/4`.
pub fn solve_n_qubit(theta: f64, n: usize) -> Result<PhaseSolution> {
    check_theta(theta)?;
    if n == 0 {
        return Err(QelimError::InvalidParameter(
            "qubit count must be >= 1".into(),
        ));
    }
    if n > 16 {
        return Err(QelimError::InvalidParameter(
            "qubit count above 16 not supported".into(),
        ));
    }
    let threshold = (2f64.powf(1.0 / n as f64) - 1.0).atan();
    if theta > PI / 4.0 + tol::RANGE_BOUNDARY {
        return Err(QelimError::NoExactSolution {
            theta,
            reason: format!("theta above pi/4; validity is [{threshold:.6}, pi/4]"),
        });
    }
    let t = theta.tan();
    let w = |beta: f64| {
        Complex64::new(1.0, 0.0)
            - (Complex64::new(1.0, 0.0) + Complex64::from_polar(t, beta)).powu(n as u32)
    };
    let f = |beta: f64| w(beta).norm() - 1.0;
    let f0 = f(0.0);
    if f0 < -tol::RANGE_BOUNDARY {
        return Err(QelimError::NoExactSolution {
            theta,
            reason: format!(
                "tan(theta) = {t:.6} below 2^(1/{n}) - 1; threshold theta = {threshold:.6}"
            ),
        });
    }
    let beta = if f0 <= 0.0 {
        0.0
    } else {
        // f(0) >= 0 and f(pi) <= 0 inside the validity range.
        let (mut lo, mut hi) = (0.0f64, PI);
        if f(hi) > 0.0 {
            return Err(QelimError::NumericalFailure(
                "bisection bracket lost at beta = pi".into(),
            ));
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let alpha = w(beta).arg();
    let residual = (Complex64::from_polar(1.0, alpha)
        + (Complex64::new(1.0, 0.0) + Complex64::from_polar(t, beta)).powu(n as u32)
        - Complex64::new(1.0, 0.0))
    .norm();
    if residual > tol::N_QUBIT_RESIDUAL {
        return Err(QelimError::NumericalFailure(format!(
            "phase condition residual {residual:.3e} after root finding"
        )));
    }
    let basis_phases = (0..1usize << n)
        .map(|x| {
            if x == 0 {
                alpha
            } else {
                (x.count_ones() as f64) * beta
            }
        })
        .collect();
    Ok(PhaseSolution {
        kind: ScenarioKind::NQubit,
        theta: Some(theta),
        qubits: n,
        angles: vec![("alpha".into(), alpha), ("beta".into(), beta)],
        basis_phases,
        theta_range: (threshold, PI / 4.0),
    })
}

/// Two-qubit single-state elimination, solvable for `tanθ >= sqrt(2) - 1`
/// (θ >= π/8). The reported angle `phi` satisfies
/// `1 - tan²θ - 2 tanθ cosφ = 0`; the seed phases are the n = 2 instance
/// of the n-qubit solution, which satisfies the same orthogonality
/// condition and keeps the two solvers' POVMs identical.
pub fn solve_two_qubit(theta: f64) -> Result<PhaseSolution> {
    let mut sol = solve_n_qubit(theta, 2).map_err(|e| match e {
        QelimError::NoExactSolution { theta, .. } => QelimError::NoExactSolution {
            theta,
            reason: format!(
                "tan(theta) = {:.6} below sqrt(2) - 1 (theta < pi/8); use failure_two_qubit",
                theta.tan()
            ),
        },
        other => other,
    })?;
    let t = theta.tan();
    let phi = safe_acos((1.0 - t * t) / (2.0 * t));
    let residual = (1.0 - t * t - 2.0 * t * phi.cos()).abs();
    if residual > tol::SOLVER_RESIDUAL {
        return Err(QelimError::NumericalFailure(format!(
            "two-qubit phase condition residual {residual:.3e}"
        )));
    }
    sol.kind = ScenarioKind::TwoQubit;
    sol.angles.insert(0, ("phi".into(), phi));
    Ok(sol)
}

/// Three-qubit pair elimination: phases `(π, β, 0, α, -β, 0, -α, π)` with
/// `1 = (1 + 2cosα) tan²θ` and `tan²θ = 1 + 2cosβ`, solvable for
/// `1/3 <= tan²θ <= 3`.
pub fn solve_three_qubit_pairs(theta: f64) -> Result<PhaseSolution> {
    check_theta(theta)?;
    let t2 = theta.tan().powi(2);
    let (lo, hi) = (1.0 / 3.0, 3.0);
    if t2 < lo - tol::RANGE_BOUNDARY || t2 > hi + tol::RANGE_BOUNDARY {
        return Err(QelimError::NoExactSolution {
            theta,
            reason: format!("tan²θ = {t2:.6} outside [1/3, 3]"),
        });
    }
    let alpha = safe_acos((1.0 / t2 - 1.0) / 2.0);
    let beta = safe_acos((t2 - 1.0) / 2.0);
    let r1 = ((1.0 + 2.0 * alpha.cos()) * t2 - 1.0).abs();
    let r2 = (1.0 + 2.0 * beta.cos() - t2).abs();
    if r1.max(r2) > tol::SOLVER_RESIDUAL {
        return Err(QelimError::NumericalFailure(format!(
            "three-qubit phase conditions residuals {r1:.3e}, {r2:.3e}"
        )));
    }
    Ok(PhaseSolution {
        kind: ScenarioKind::ThreeQubitPairs,
        theta: Some(theta),
        qubits: 3,
        angles: vec![("alpha".into(), alpha), ("beta".into(), beta)],
        // Index order 000..111: phi_000 = phi_111 = pi, phi_011 = alpha,
        // phi_101 = 0, phi_110 = -alpha, phi_001 = beta, phi_010 = 0,
        // phi_100 = -beta.
        basis_phases: vec![PI, beta, 0.0, alpha, -beta, 0.0, -alpha, PI],
        theta_range: (lo.sqrt().atan(), hi.sqrt().atan()),
    })
}

/// Four-qubit quadruple elimination: unit coefficients with
/// `cosα = (1 - tan⁴θ) / (2 tan²θ)` on z_0011 (and its conjugate on
/// z_1100), solvable for `sqrt(2) - 1 <= tan²θ <= 1`.
pub fn solve_four_qubit_quads(theta: f64) -> Result<PhaseSolution> {
    check_theta(theta)?;
    let t2 = theta.tan().powi(2);
    let (lo, hi) = (2f64.sqrt() - 1.0, 1.0);
    if t2 < lo - tol::RANGE_BOUNDARY || t2 > hi + tol::RANGE_BOUNDARY {
        return Err(QelimError::NoExactSolution {
            theta,
            reason: format!("tan²θ = {t2:.6} outside [sqrt(2)-1, 1]"),
        });
    }
    let alpha = safe_acos((1.0 - t2 * t2) / (2.0 * t2));
    let residual = (t2 * t2 + 2.0 * alpha.cos() * t2 - 1.0).abs();
    if residual > tol::SOLVER_RESIDUAL {
        return Err(QelimError::NumericalFailure(format!(
            "four-qubit phase condition residual {residual:.3e}"
        )));
    }
    let mut basis_phases = vec![PI; 16];
    for x in [0b1000, 0b0010, 0b0111, 0b1101, 0b0101, 0b0110, 0b1111] {
        basis_phases[x] = 0.0;
    }
    basis_phases[0b0011] = alpha;
    basis_phases[0b1100] = -alpha;
    Ok(PhaseSolution {
        kind: ScenarioKind::FourQubitQuads,
        theta: Some(theta),
        qubits: 4,
        angles: vec![("alpha".into(), alpha)],
        basis_phases,
        theta_range: (lo.sqrt().atan(), hi.sqrt().atan()),
    })
}

/// The failure construction for two qubits at `0 <= θ <= π/8`:
/// `c_01 = c_10 = c_11 = -1/2`, `c_00 = tanθ + tan²θ/2`, with
/// `Pi_f = I - sum_g Pi_g` and
/// `P_f = 1 - 2 sin²θ [1 + 2 cosθ (cosθ + sinθ)]`.
pub fn failure_povm_two_qubit(theta: f64) -> Result<FailurePovm> {
    check_theta(theta)?;
    let t = theta.tan();
    if t > 2f64.sqrt() - 1.0 + tol::RANGE_BOUNDARY {
        return Err(QelimError::ExactRegime { theta });
    }
    let c00 = t + 0.5 * t * t;
    let coefficients = vec![
        Complex64::new(c00, 0.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(-0.5, 0.0),
        Complex64::new(-0.5, 0.0),
    ];
    if coefficients
        .iter()
        .any(|c| c.norm() > 0.5 + tol::CONSTRUCTION)
    {
        return Err(QelimError::NumericalFailure(format!(
            "|c_00| = {c00:.12} exceeds 1/2 inside the failure regime"
        )));
    }
    let x = CVec::from_vec(coefficients.clone());
    let rep = two_qubit_rep(2)?;
    let mut sum = CMat::zeros(4, 4);
    for g in rep.group().elements() {
        let gx = rep.apply(g, &x);
        linalg::add_outer(&mut sum, &gx);
    }
    let failure_element = linalg::identity(4) - sum;
    let min_eig = *linalg::hermitian_eigenvalues(&failure_element)
        .first()
        .expect("4x4 matrix has eigenvalues");
    if min_eig < -tol::DERIVED {
        return Err(QelimError::NumericalFailure(format!(
            "failure element not positive semidefinite: min eigenvalue {min_eig:.3e}"
        )));
    }
    let s2 = theta.sin().powi(2);
    let failure_probability =
        1.0 - 2.0 * s2 * (1.0 + 2.0 * theta.cos() * (theta.cos() + theta.sin()));
    Ok(FailurePovm {
        coefficients,
        failure_element,
        failure_probability,
    })
}

// ---------------------------------------------------------------------------
// Scenario assembly
// ---------------------------------------------------------------------------

/// A fully assembled scenario: group, representation, decomposition,
/// fiducial, eliminated subgroup, and seed, ready to build its POVM.
#[derive(Debug, Clone)]
pub struct ScenarioInstance {
    pub kind: ScenarioKind,
    pub theta: Option<f64>,
    pub qubits: usize,
    /// States per qubit (N of the Z_N extension; 2 for the base scenarios,
    /// 3 for the trine's Z3, 6 states total for D3).
    pub states_per_qubit: usize,
    pub solution: Option<PhaseSolution>,
    pub scenario: EliminationScenario,
    pub decomposition: IrrepDecomposition,
    pub seed: Option<SeedVector>,
    pub failure: Option<FailurePovm>,
}

impl ScenarioInstance {
    /// Builds the scenario's POVM: the covariant orbit, merged over cosets
    /// when the eliminated subgroup is nontrivial, with the failure element
    /// appended for the failure scenario.
    pub fn build_povm(&self) -> Result<Povm> {
        if let Some(failure) = &self.failure {
            return build_failure_povm(&self.scenario, failure);
        }
        let seed = self
            .seed
            .as_ref()
            .ok_or_else(|| QelimError::NumericalFailure("scenario has no seed".into()))?;
        let povm = covariant_povm(&self.scenario, seed)?;
        if self.scenario.eliminated_subgroup().order() > 1 {
            let partition = self.scenario.coset_partition()?;
            merge_by_cosets(&povm, &partition)
        } else {
            Ok(povm)
        }
    }

    /// Mean failure probability evaluated directly from the POVM: the
    /// average over the orbit states of the failure outcome's Born
    /// probability (the independent route against the closed form).
    pub fn failure_probability_direct(&self, povm: &Povm) -> Option<f64> {
        self.failure.as_ref()?;
        let fail = povm.elements().iter().find(|e| e.label() == "fail")?;
        let states = self.scenario.states();
        Some(states.iter().map(|s| fail.expectation(s)).sum::<f64>() / states.len() as f64)
    }
}

fn build_failure_povm(scenario: &EliminationScenario, failure: &FailurePovm) -> Result<Povm> {
    let rep = scenario.rep();
    let x = CVec::from_vec(failure.coefficients.clone());
    let mut elements: Vec<PovmElement> = scenario
        .group()
        .elements()
        .map(|g| {
            PovmElement::new(
                scenario.group().label(g).to_string(),
                vec![g],
                vec![rep.apply(g, &x)],
            )
        })
        .collect();
    // Factor Pi_f through its eigendecomposition; it is PSD by the solver's
    // construction check.
    let (vals, vecs) = linalg::hermitian_eigen(&failure.failure_element);
    let mut factors = Vec::new();
    for (l, v) in vals.iter().zip(vecs) {
        if *l > tol::RANK_EIG * tol::RANK_EIG {
            factors.push(v * Complex64::new(l.sqrt(), 0.0));
        }
    }
    elements.push(PovmElement::new("fail".into(), vec![], factors));
    let povm = Povm::new(rep.dim(), elements);
    let residual = povm.completeness_residual();
    if residual > tol::COMPLETENESS_BUILD {
        return Err(QelimError::CompletenessFailure {
            residual,
            tolerance: tol::COMPLETENESS_BUILD,
        });
    }
    Ok(povm)
}

/// The Z_N x Z_N ... x Z_N qubit-sequence representation (one fresh Z_N
/// factor per qubit, so the tensor lands on the product group).
fn qubit_sequence_rep(n_states: usize, qubits: usize) -> Result<UnitaryRepresentation> {
    let mut rep = crate::repr::rep_cyclic_qubit(n_states)?;
    for _ in 1..qubits {
        rep = rep.tensor(&crate::repr::rep_cyclic_qubit(n_states)?)?;
    }
    Ok(rep)
}

fn two_qubit_rep(n_states: usize) -> Result<UnitaryRepresentation> {
    qubit_sequence_rep(n_states, 2)
}

/// Mixed-radix index of a digit tuple in an iterated product group.
fn product_index(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

/// Eliminated subgroup of the Z_N^x n scenarios for a solution kind.
fn eliminated_subgroup(
    kind: ScenarioKind,
    group: &Arc<FiniteGroup>,
    qubits: usize,
    n_states: usize,
) -> Result<Subgroup> {
    match kind {
        ScenarioKind::ThreeQubitPairs => {
            let h = n_states / 2;
            let members = vec![
                GroupElement(0),
                GroupElement(product_index(&vec![h; qubits], n_states)),
            ];
            Subgroup::new(group.clone(), &members)
        }
        ScenarioKind::FourQubitQuads => {
            let h = n_states / 2;
            let members = vec![
                GroupElement(0),
                GroupElement(product_index(&[0, 0, h, h], n_states)),
                GroupElement(product_index(&[h, h, 0, 0], n_states)),
                GroupElement(product_index(&[h, h, h, h], n_states)),
            ];
            Subgroup::new(group.clone(), &members)
        }
        _ => Ok(Subgroup::trivial(group.clone())),
    }
}

/// Extends a phase solution from Z_2 to Z_N per qubit: the same seed
/// phases with the normalization rescaled from `1/2^{n/2}` to `1/N^{n/2}`,
/// on the group Z_N^x n with the diagonal qubit representation.
///
/// N must be at least 2, and even for the pair and quadruple scenarios
/// (the eliminated partner state exists only when the representation
/// contains the reflection, i.e. the order-2 element of Z_N).
pub fn extend_to_zn(solution: &PhaseSolution, n_states: usize) -> Result<ScenarioInstance> {
    if n_states < 2 {
        return Err(QelimError::InvalidParameter("N must be >= 2".into()));
    }
    match solution.kind {
        ScenarioKind::TwoQubit | ScenarioKind::NQubit => {}
        ScenarioKind::ThreeQubitPairs | ScenarioKind::FourQubitQuads => {
            if !n_states.is_multiple_of(2) {
                return Err(QelimError::InvalidParameter(format!(
                    "N needs to be even for {}; got {n_states}",
                    solution.kind
                )));
            }
        }
        other => {
            return Err(QelimError::InvalidParameter(format!(
                "scenario {other} has no Z_N extension"
            )));
        }
    }
    let theta = solution
        .theta
        .ok_or_else(|| QelimError::InvalidParameter("solution carries no theta".into()))?;
    let qubits = solution.qubits;
    let rep = qubit_sequence_rep(n_states, qubits)?;
    let group = rep.group().clone();
    let table = character_table(&group)?;
    let decomposition = decompose(&rep, &table)?;
    debug_assert_eq!(decomposition.total_basis_len(), 1 << qubits);

    let scale = 1.0 / (group.order() as f64).sqrt();
    let amplitudes: Vec<Complex64> = solution
        .basis_phases
        .iter()
        .map(|&phi| Complex64::from_polar(scale, phi))
        .collect();
    let seed = build_seed(&decomposition, &amplitudes)?;

    let fiducial = fiducial_state(theta, &vec![false; qubits]);
    let eliminated = eliminated_subgroup(solution.kind, &group, qubits, n_states)?;
    let scenario = EliminationScenario::new(rep, fiducial, eliminated)?;

    Ok(ScenarioInstance {
        kind: solution.kind,
        theta: Some(theta),
        qubits,
        states_per_qubit: n_states,
        solution: Some(solution.clone()),
        scenario,
        decomposition,
        seed: Some(seed),
        failure: None,
    })
}

/// The trine scenario: Z3 rotation representation, fiducial |0>, seed
/// `i sqrt(2/3) |1>`.
pub fn trine_scenario() -> Result<ScenarioInstance> {
    let rep = crate::repr::rep_rotation_z3();
    let group = rep.group().clone();
    let table = character_table(&group)?;
    let decomposition = decompose(&rep, &table)?;
    let solution = solve_trine();
    let scale = 1.0 / 3f64.sqrt();
    let amplitudes: Vec<Complex64> = solution
        .basis_phases
        .iter()
        .map(|&phi| Complex64::from_polar(scale, phi))
        .collect();
    let seed = build_seed(&decomposition, &amplitudes)?;
    let fiducial = CVec::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let scenario = EliminationScenario::new(rep, fiducial, Subgroup::trivial(group))?;
    Ok(ScenarioInstance {
        kind: ScenarioKind::Trine,
        theta: None,
        qubits: 1,
        states_per_qubit: 3,
        solution: Some(solution),
        scenario,
        decomposition,
        seed: Some(seed),
        failure: None,
    })
}

/// The D3 scenario: Γ3 ⊗ Γ3 on two qubits, fiducial |0>|+x>, seed
/// `(2/sqrt 6) |0>|-x>` through the invariant-basis phases (0, π, 0, π).
pub fn d3_scenario() -> Result<ScenarioInstance> {
    let g3 = crate::repr::rep_d3_standard();
    let rep = g3.tensor(&g3)?;
    let group = rep.group().clone();
    let table = character_table(&group)?;
    let decomposition = decompose(&rep, &table)?;
    let solution = PhaseSolution {
        kind: ScenarioKind::D3,
        theta: None,
        qubits: 2,
        angles: vec![],
        basis_phases: vec![0.0, PI, 0.0, PI],
        theta_range: (0.0, 0.0),
    };
    let scale = 1.0 / 6f64.sqrt();
    let amplitudes: Vec<Complex64> = solution
        .basis_phases
        .iter()
        .map(|&phi| Complex64::from_polar(scale, phi))
        .collect();
    let seed = build_seed(&decomposition, &amplitudes)?;
    let s = 1.0 / 2f64.sqrt();
    let fiducial = CVec::from_vec(vec![
        Complex64::new(s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    let scenario = EliminationScenario::new(rep, fiducial, Subgroup::trivial(group))?;
    Ok(ScenarioInstance {
        kind: ScenarioKind::D3,
        theta: None,
        qubits: 2,
        states_per_qubit: 6,
        solution: Some(solution),
        scenario,
        decomposition,
        seed: Some(seed),
        failure: None,
    })
}

/// Two-qubit single-state elimination at `θ >= π/8`.
pub fn two_qubit_scenario(theta: f64) -> Result<ScenarioInstance> {
    extend_to_zn(&solve_two_qubit(theta)?, 2)
}

/// Three-qubit pair elimination, merged into four rank-two outcomes.
pub fn three_qubit_pairs_scenario(theta: f64) -> Result<ScenarioInstance> {
    extend_to_zn(&solve_three_qubit_pairs(theta)?, 2)
}

/// Four-qubit quadruple elimination, merged into four rank-four outcomes.
pub fn four_qubit_quads_scenario(theta: f64) -> Result<ScenarioInstance> {
    extend_to_zn(&solve_four_qubit_quads(theta)?, 2)
}

/// n-qubit single-state elimination at `arctan(2^{1/n} - 1) <= θ <= π/4`.
pub fn n_qubit_scenario(theta: f64, n: usize) -> Result<ScenarioInstance> {
    extend_to_zn(&solve_n_qubit(theta, n)?, 2)
}

/// The two-qubit failure scenario for `0 <= θ <= π/8`: four eliminating
/// outcomes plus the inconclusive outcome "fail".
pub fn failure_two_qubit_scenario(theta: f64) -> Result<ScenarioInstance> {
    let failure = failure_povm_two_qubit(theta)?;
    let rep = two_qubit_rep(2)?;
    let group = rep.group().clone();
    let table = character_table(&group)?;
    let decomposition = decompose(&rep, &table)?;
    let fiducial = fiducial_state(theta, &[false, false]);
    let scenario = EliminationScenario::new(rep, fiducial, Subgroup::trivial(group))?;
    Ok(ScenarioInstance {
        kind: ScenarioKind::FailureTwoQubit,
        theta: Some(theta),
        qubits: 2,
        states_per_qubit: 2,
        solution: None,
        scenario,
        decomposition,
        seed: None,
        failure: Some(failure),
    })
}

/// Builds any scenario from its parameters (the CLI entry point).
pub fn build_scenario(
    kind: ScenarioKind,
    theta: Option<f64>,
    qubits: Option<usize>,
    n_states: usize,
) -> Result<ScenarioInstance> {
    let need_theta = || {
        theta.ok_or_else(|| QelimError::InvalidParameter(format!("scenario {kind} requires theta")))
    };
    match kind {
        ScenarioKind::Trine => trine_scenario(),
        ScenarioKind::D3 => d3_scenario(),
        ScenarioKind::TwoQubit => extend_to_zn(&solve_two_qubit(need_theta()?)?, n_states),
        ScenarioKind::ThreeQubitPairs => {
            extend_to_zn(&solve_three_qubit_pairs(need_theta()?)?, n_states)
        }
        ScenarioKind::FourQubitQuads => {
            extend_to_zn(&solve_four_qubit_quads(need_theta()?)?, n_states)
        }
        ScenarioKind::NQubit => {
            let n = qubits.ok_or_else(|| {
                QelimError::InvalidParameter("n_qubit scenario requires the qubit count".into())
            })?;
            extend_to_zn(&solve_n_qubit(need_theta()?, n)?, n_states)
        }
        ScenarioKind::FailureTwoQubit => {
            if n_states != 2 {
                return Err(QelimError::InvalidParameter(
                    "the failure scenario is implemented for N = 2".into(),
                ));
            }
            failure_two_qubit_scenario(need_theta()?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{verify_elimination, verify_povm};

    #[test]
    fn fiducial_states() {
        let v = fiducial_state(0.0, &[false, false, true]);
        assert!((v[0].re - 1.0).abs() < 1e-15, "theta = 0 gives |000>");
        let v = fiducial_state(PI / 4.0, &[false]);
        assert!((v[0].re - v[1].re).abs() < 1e-15, "theta = pi/4 gives |+x>");
        let th = 0.3;
        let v = fiducial_state(th, &[false, true]);
        let (c, s) = (th.cos(), th.sin());
        let expected = [c * c, -c * s, s * c, -s * s];
        for (a, b) in v.iter().zip(expected) {
            assert!((a.re - b).abs() < 1e-15);
        }
    }

    #[test]
    fn trine_solution_phases() {
        let sol = solve_trine();
        assert_eq!(sol.basis_phases, vec![0.0, PI]);
    }

    #[test]
    fn two_qubit_phi_at_special_angles() {
        let sol = solve_two_qubit(PI / 8.0).unwrap();
        assert!(
            sol.angle("phi").unwrap().abs() < 1e-7,
            "cos phi = 1 at pi/8"
        );
        let sol = solve_two_qubit(PI / 4.0).unwrap();
        assert!((sol.angle("phi").unwrap() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_below_threshold() {
        let err = solve_two_qubit(PI / 16.0);
        assert!(matches!(err, Err(QelimError::NoExactSolution { .. })));
    }

    #[test]
    fn two_qubit_seed_orthogonal_to_fiducial() {
        for theta in [PI / 8.0, 0.5, 0.6, PI / 4.0] {
            let inst = two_qubit_scenario(theta).unwrap();
            let ip = inst
                .scenario
                .fiducial()
                .dotc(inst.seed.as_ref().unwrap().amplitudes());
            assert!(ip.norm() < 1e-12, "<psi_e|X> = 0 at theta = {theta}");
        }
    }

    #[test]
    fn three_qubit_angles() {
        let sol = solve_three_qubit_pairs(PI / 4.0).unwrap();
        assert!((sol.angle("alpha").unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((sol.angle("beta").unwrap() - PI / 2.0).abs() < 1e-12);

        // Boundary tan²θ = 1/3: alpha = 0, beta = arccos(-1/3).
        let theta = (1.0f64 / 3.0).sqrt().atan();
        let sol = solve_three_qubit_pairs(theta).unwrap();
        assert!(sol.angle("alpha").unwrap().abs() < 1e-6);
        assert!((sol.angle("beta").unwrap() - (-1.0f64 / 3.0).acos()).abs() < 1e-10);

        let big = 2.0f64.atan(); // tan²θ = 4
        assert!(matches!(
            solve_three_qubit_pairs(big),
            Err(QelimError::NoExactSolution { .. })
        ));
    }

    #[test]
    fn four_qubit_angles() {
        let sol = solve_four_qubit_quads(PI / 4.0).unwrap();
        assert!(
            (sol.angle("alpha").unwrap() - PI / 2.0).abs() < 1e-12,
            "tan²θ = 1"
        );
        let theta = (2f64.sqrt() - 1.0).sqrt().atan();
        let sol = solve_four_qubit_quads(theta).unwrap();
        assert!(
            sol.angle("alpha").unwrap() < 1e-6,
            "cos alpha = 1 at the boundary"
        );
    }

    #[test]
    fn four_qubit_seed_orthogonal_to_eliminated_set() {
        let theta = 0.6;
        let inst = four_qubit_quads_scenario(theta).unwrap();
        let seed = inst.seed.as_ref().unwrap().amplitudes();
        for signs in [
            [false, false, false, false],
            [true, true, true, true],
            [false, false, true, true],
            [true, true, false, false],
        ] {
            let state = fiducial_state(theta, &signs);
            assert!(state.dotc(seed).norm() < 1e-12);
        }
    }

    #[test]
    fn n_qubit_edge_cases() {
        // n = 1 at theta = pi/4: alpha = beta + pi with beta = 0.
        let sol = solve_n_qubit(PI / 4.0, 1).unwrap();
        assert!(sol.angle("beta").unwrap().abs() < 1e-12);
        assert!((sol.angle("alpha").unwrap().abs() - PI).abs() < 1e-9);

        // n = 2 reproduces the two-qubit solution.
        let a = solve_n_qubit(0.5, 2).unwrap();
        let b = solve_two_qubit(0.5).unwrap();
        assert_eq!(a.basis_phases, b.basis_phases);

        // Just below the n = 3 threshold.
        let th = (2f64.powf(1.0 / 3.0) - 1.0).atan() - 1e-4;
        assert!(matches!(
            solve_n_qubit(th, 3),
            Err(QelimError::NoExactSolution { .. })
        ));
    }

    #[test]
    fn failure_povm_values() {
        let f = failure_povm_two_qubit(PI / 8.0).unwrap();
        assert!(f.failure_probability.abs() < 1e-12, "P_f = 0 at pi/8");

        let f = failure_povm_two_qubit(1e-6).unwrap();
        assert!(
            (f.failure_probability - 1.0).abs() < 1e-5,
            "P_f -> 1 as theta -> 0"
        );

        assert!(matches!(
            failure_povm_two_qubit(0.5),
            Err(QelimError::ExactRegime { .. })
        ));
    }

    #[test]
    fn failure_probability_interior_bounds() {
        // Strictly inside (0, pi/8): 0 < P_f < 1 and |c_00| < 1/2 strictly.
        let n = 40;
        let mut last = 1.0f64;
        for i in 1..n {
            let theta = PI / 8.0 * i as f64 / n as f64;
            let f = failure_povm_two_qubit(theta).unwrap();
            let pf = f.failure_probability;
            assert!(pf > 0.0 && pf < 1.0, "P_f = {pf} at theta = {theta}");
            assert!(pf < last, "P_f decreases toward the threshold");
            last = pf;
            assert!(f.coefficients[0].norm() < 0.5, "|c_00| strictly below 1/2");
        }
        // Continuity at the boundary: P_f reaches 0 at pi/8.
        let end = failure_povm_two_qubit(PI / 8.0).unwrap();
        assert!(end.failure_probability.abs() < 1e-10);
        assert!(last < 0.1, "P_f is small just below the boundary");
    }

    #[test]
    fn failure_povm_closed_form_matches_direct() {
        let theta = PI / 12.0;
        let inst = failure_two_qubit_scenario(theta).unwrap();
        let povm = inst.build_povm().unwrap();
        assert_eq!(povm.len(), 5);
        let direct = inst.failure_probability_direct(&povm).unwrap();
        let closed = inst.failure.as_ref().unwrap().failure_probability;
        assert!((direct - closed).abs() < 1e-12);
        assert!(verify_povm(&povm).pass);
        assert!(verify_elimination(&povm, &inst.scenario).pass);
    }

    #[test]
    fn three_qubit_scenario_merges_to_four_rank_two_elements() {
        let inst = three_qubit_pairs_scenario(0.7).unwrap();
        let povm = inst.build_povm().unwrap();
        assert_eq!(povm.len(), 4);
        assert_eq!(povm.ranks(), vec![2, 2, 2, 2]);
        assert!(verify_povm(&povm).pass);
        assert!(verify_elimination(&povm, &inst.scenario).pass);

        // Merging only reassociates the sum of elements.
        let unmerged = covariant_povm(&inst.scenario, inst.seed.as_ref().unwrap()).unwrap();
        let diff = linalg::max_diff(&povm.completeness_matrix(), &unmerged.completeness_matrix());
        assert!(diff < 1e-14, "merge changed the element sum by {diff:.3e}");
    }

    #[test]
    fn zn_extension_two_qubit() {
        let sol = solve_two_qubit(PI / 6.0).unwrap();
        let inst = extend_to_zn(&sol, 4).unwrap();
        let povm = inst.build_povm().unwrap();
        assert_eq!(povm.len(), 16);
        assert!(verify_povm(&povm).pass);
        assert!(verify_elimination(&povm, &inst.scenario).pass);
    }

    #[test]
    fn zn_extension_n2_is_identity() {
        let sol = solve_two_qubit(0.5).unwrap();
        let base = two_qubit_scenario(0.5).unwrap();
        let ext = extend_to_zn(&sol, 2).unwrap();
        let pa = base.build_povm().unwrap();
        let pb = ext.build_povm().unwrap();
        assert_eq!(pa.len(), pb.len());
        for (a, b) in pa.elements().iter().zip(pb.elements()) {
            assert!(linalg::max_diff(&a.matrix(4), &b.matrix(4)) < 1e-15);
        }
    }

    #[test]
    fn zn_extension_rejects_odd_n_for_pairs() {
        let sol = solve_three_qubit_pairs(0.7).unwrap();
        assert!(matches!(
            extend_to_zn(&sol, 3),
            Err(QelimError::InvalidParameter(_))
        ));
    }
}
