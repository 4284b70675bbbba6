//! Implementations of the verify, sweep, figure1, and sample commands.

use qelim::entropy::{figure1_data, holevo_check, threshold_s};
use qelim::povm::{sample_outcomes, verify_elimination, verify_povm};
use qelim::solvers::{build_scenario, ScenarioInstance, ScenarioKind};
use qelim::{QelimError, Result};

use crate::config::Resolved;
use crate::report::{AngleOut, EntropyOut, RunReport, SampleReport, StateSample};

/// Full double precision: 17 significant digits.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn build(cfg: &Resolved) -> Result<ScenarioInstance> {
    build_scenario(cfg.kind, cfg.theta, cfg.n, cfg.big_n)
}

/// Builds the scenario, verifies the POVM and the elimination property,
/// and (for coset scenarios) evaluates the entropic feasibility condition.
pub fn run_verify(cfg: &Resolved) -> Result<RunReport> {
    let inst = build(cfg)?;
    let povm = inst.build_povm()?;
    let povm_report = verify_povm(&povm);
    let elim = verify_elimination(&povm, &inst.scenario);

    let entropy = if inst.scenario.eliminated_subgroup().order() > 1 {
        let report = holevo_check(&inst.scenario.state_sets()?)?;
        Some(EntropyOut {
            s_rho_bits: report.s_rho,
            s_sets_bits: report.s_sets.clone(),
            holevo_gap_bits: report.holevo_gap,
            bound_bits: report.bound,
            feasible: report.feasible,
        })
    } else {
        None
    };

    let failure_probability = inst.failure.as_ref().map(|f| f.failure_probability);
    let failure_probability_direct = inst.failure_probability_direct(&povm);
    let failure_consistent = match (failure_probability, failure_probability_direct) {
        (Some(closed), Some(direct)) => (closed - direct).abs() <= 1e-10,
        _ => true,
    };

    let pass = povm_report.pass
        && elim.pass
        && entropy.as_ref().is_none_or(|e| e.feasible)
        && failure_consistent;

    Ok(RunReport {
        scenario: inst.kind.to_string(),
        theta: inst.theta,
        qubits: inst.qubits,
        states_per_qubit: inst.states_per_qubit,
        outcomes: povm.len(),
        outcome_labels: povm.labels().iter().map(|s| s.to_string()).collect(),
        ranks: povm_report.element_ranks.clone(),
        completeness_residual: povm_report.completeness_residual,
        min_eigenvalue: povm_report.min_eigenvalue,
        elimination_max_probability: elim.max_probability,
        angles: inst
            .solution
            .as_ref()
            .map(|sol| {
                sol.angles
                    .iter()
                    .map(|(name, radians)| AngleOut {
                        name: clone_name(name),
                        radians: *radians,
                    })
                    .collect()
            })
            .unwrap_or_default(),
        failure_probability,
        failure_probability_direct,
        entropy,
        pass,
    })
}

fn clone_name(name: &str) -> String {
    name.to_string()
}

/// One row per theta: solvable flag and the verification residuals, with
/// the failure probability where the scenario defines one. Unsolvable
/// thetas produce a row with empty numeric fields.
pub fn run_sweep(cfg: &Resolved, theta_min: f64, theta_max: f64, points: usize) -> Result<String> {
    if points < 2 {
        return Err(QelimError::InvalidParameter(
            "sweep needs at least 2 points".into(),
        ));
    }
    if matches!(cfg.kind, ScenarioKind::Trine | ScenarioKind::D3) {
        return Err(QelimError::InvalidParameter(format!(
            "scenario {} has no theta to sweep",
            cfg.kind
        )));
    }
    let mut out = String::from(
        "theta,solvable,orthogonality_residual,completeness_residual,elimination_max_probability,min_eigenvalue,failure_probability\n",
    );
    for i in 0..points {
        let theta = theta_min + (theta_max - theta_min) * i as f64 / (points - 1) as f64;
        let row = match build_scenario(cfg.kind, Some(theta), cfg.n, cfg.big_n) {
            Ok(inst) => {
                let povm = inst.build_povm()?;
                let povm_report = verify_povm(&povm);
                let elim = verify_elimination(&povm, &inst.scenario);
                let ortho = orthogonality_residual(&inst);
                let pf = inst
                    .failure
                    .as_ref()
                    .map(|f| fmt(f.failure_probability))
                    .unwrap_or_default();
                format!(
                    "{},true,{},{},{},{},{}\n",
                    fmt(theta),
                    fmt(ortho),
                    fmt(povm_report.completeness_residual),
                    fmt(elim.max_probability),
                    fmt(povm_report.min_eigenvalue),
                    pf
                )
            }
            Err(QelimError::NoExactSolution { .. }) | Err(QelimError::ExactRegime { .. }) => {
                format!("{},false,,,,,\n", fmt(theta))
            }
            Err(other) => return Err(other),
        };
        out.push_str(&row);
    }
    Ok(out)
}

/// Largest overlap between the seed and any state it must annihilate.
fn orthogonality_residual(inst: &ScenarioInstance) -> f64 {
    let seed = match (&inst.seed, &inst.failure) {
        (Some(seed), _) => seed.amplitudes().clone(),
        (None, Some(f)) => qelim::linalg::CVec::from_vec(f.coefficients.clone()),
        _ => return f64::NAN,
    };
    inst.scenario
        .eliminated_subgroup()
        .members()
        .iter()
        .map(|&h| inst.scenario.state(h).dotc(&seed).norm())
        .fold(0.0, f64::max)
}

/// Feasibility-plot rows (s, gap, bound) plus a footer row carrying the
/// bisection threshold, flagged by the is_threshold column.
pub fn run_figure1(points: usize) -> Result<String> {
    if points < 2 {
        return Err(QelimError::InvalidParameter(
            "figure1 needs at least 2 points".into(),
        ));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| 0.5 * i as f64 / (points - 1) as f64)
        .collect();
    let rows = figure1_data(&grid)?;
    let mut out = String::from("s,entropy_gap,bound,is_threshold\n");
    for r in &rows {
        out.push_str(&format!("{},{},{},0\n", fmt(r.s), fmt(r.gap), fmt(r.bound)));
    }
    let s_star = threshold_s()?;
    let star = figure1_data(&[s_star])?;
    out.push_str(&format!(
        "{},{},{},1\n",
        fmt(s_star),
        fmt(star[0].gap),
        fmt(star[0].bound)
    ));
    Ok(out)
}

/// Samples every orbit state `shots` times; each state's own outcome (the
/// one eliminating its coset) must never fire. State k uses seed
/// `base_seed + k`, so the whole report is reproducible byte for byte.
pub fn run_sample(cfg: &Resolved) -> Result<SampleReport> {
    let inst = build(cfg)?;
    let povm = inst.build_povm()?;
    let mut states = Vec::with_capacity(inst.scenario.group().order());
    let mut pass = true;
    for (idx, g) in inst.scenario.group().elements().enumerate() {
        let eliminated_idx = povm
            .elements()
            .iter()
            .position(|e| e.members().contains(&g))
            .ok_or_else(|| {
                QelimError::NumericalFailure(format!(
                    "state {} is eliminated by no outcome",
                    inst.scenario.group().label(g)
                ))
            })?;
        let seed = cfg.seed.wrapping_add(idx as u64);
        let sample = sample_outcomes(&povm, &inst.scenario.state(g), cfg.shots, seed)?;
        let eliminated_count = sample.counts[eliminated_idx];
        pass &= eliminated_count == 0;
        states.push(StateSample {
            state: inst.scenario.group().label(g).to_string(),
            eliminated_outcome: povm.elements()[eliminated_idx].label().to_string(),
            counts: sample.counts,
            eliminated_count,
            seed,
        });
    }
    Ok(SampleReport {
        scenario: inst.kind.to_string(),
        theta: inst.theta,
        shots: cfg.shots,
        base_seed: cfg.seed,
        outcome_labels: povm.labels().iter().map(|s| s.to_string()).collect(),
        states,
        pass,
    })
}
