//! Covariant POVM assembly, coset merging, verification, Born
//! probabilities, and seeded multinomial sampling.
//!
//! POVM elements are kept in factored form, `Pi = sum_i |f_i><f_i|`, which
//! every construction here produces naturally (orbit elements are rank one,
//! merged elements are sums of orbit elements, and the failure element is
//! factored through its eigendecomposition). The factored form makes
//! positivity structural, keeps expectation values O(dim) per factor, and
//! avoids holding |G| dense matrices for the larger qubit-sequence
//! scenarios. Dense matrices are materialized on demand.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::error::{QelimError, Result};
use crate::group::{CosetPartition, FiniteGroup, GroupElement, Subgroup};
use crate::linalg::{self, CMat, CVec};
use crate::repr::{IrrepDecomposition, UnitaryRepresentation};
use crate::tol;

/// A state-elimination scenario: the orbit of a fiducial state under a
/// representation, with outcomes eliminating cosets of `eliminated`.
///
/// The eliminated subgroup is trivial for single-state elimination; a
/// larger subgroup H groups the orbit into |G|/|H| state sets, one per
/// left coset.
#[derive(Debug, Clone)]
pub struct EliminationScenario {
    group: Arc<FiniteGroup>,
    rep: UnitaryRepresentation,
    fiducial: CVec,
    eliminated: Subgroup,
}

impl EliminationScenario {
    pub fn new(rep: UnitaryRepresentation, fiducial: CVec, eliminated: Subgroup) -> Result<Self> {
        let group = rep.group().clone();
        if fiducial.len() != rep.dim() {
            return Err(QelimError::InvalidParameter(
                "fiducial dimension differs from the representation".into(),
            ));
        }
        if (fiducial.norm() - 1.0).abs() > tol::CONSTRUCTION {
            return Err(QelimError::InvalidParameter(format!(
                "fiducial state is not normalized: ||psi|| = {}",
                fiducial.norm()
            )));
        }
        if **eliminated.parent() != *group {
            return Err(QelimError::InvalidSubgroup(
                "eliminated subgroup belongs to a different group".into(),
            ));
        }
        Ok(EliminationScenario {
            group,
            rep,
            fiducial,
            eliminated,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rep(&self) -> &UnitaryRepresentation {
        &self.rep
    }

    pub fn fiducial(&self) -> &CVec {
        &self.fiducial
    }

    pub fn eliminated_subgroup(&self) -> &Subgroup {
        &self.eliminated
    }

    /// The orbit state `Gamma(g) |psi_e>`.
    pub fn state(&self, g: GroupElement) -> CVec {
        self.rep.apply(g, &self.fiducial)
    }

    /// All orbit states in element order.
    pub fn states(&self) -> Vec<CVec> {
        self.group.elements().map(|g| self.state(g)).collect()
    }

    /// The left-coset partition induced by the eliminated subgroup.
    pub fn coset_partition(&self) -> Result<CosetPartition> {
        crate::group::left_cosets(&self.group, &self.eliminated)
    }

    /// The eliminated state sets, one per coset, in coset order.
    pub fn state_sets(&self) -> Result<Vec<Vec<CVec>>> {
        Ok(self
            .coset_partition()?
            .cosets()
            .iter()
            .map(|coset| coset.iter().map(|&m| self.state(m)).collect())
            .collect())
    }
}

/// A covariant seed vector together with its per-block squared norms.
/// Constructed through [`build_seed`], which enforces the completeness
/// condition `||X_p||^2 = d_p / |G|` on every block.
#[derive(Debug, Clone)]
pub struct SeedVector {
    amplitudes: CVec,
    block_norms: Vec<f64>,
}

impl SeedVector {
    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    /// `||X_p||^2` per decomposition block.
    pub fn block_norms(&self) -> &[f64] {
        &self.block_norms
    }

    /// Copy with the global phase rotated so the largest-magnitude
    /// component is real positive (for reproducible snapshots; the POVM is
    /// phase-invariant).
    pub fn canonicalized(&self) -> CVec {
        let mut v = self.amplitudes.clone();
        linalg::phase_fix(&mut v);
        v
    }
}

/// Assembles the seed `X = sum_i a_i |b_i>` from one amplitude per
/// invariant-subspace basis vector (in block order) and verifies the
/// completeness condition `||X_p||^2 = d_p / |G|` on every block.
pub fn build_seed(decomp: &IrrepDecomposition, amplitudes: &[Complex64]) -> Result<SeedVector> {
    if amplitudes.len() != decomp.total_basis_len() {
        return Err(QelimError::InvalidParameter(format!(
            "expected {} amplitudes, got {}",
            decomp.total_basis_len(),
            amplitudes.len()
        )));
    }
    let mut x = CVec::zeros(decomp.dim());
    for (a, b) in amplitudes.iter().zip(decomp.basis_vectors()) {
        x += b * *a;
    }
    let block_norms = decomp.component_norms(&x);
    for ((norm, target), block) in block_norms
        .iter()
        .zip(decomp.seed_norm_targets())
        .zip(decomp.blocks())
    {
        if (norm - target).abs() > tol::DERIVED {
            return Err(QelimError::SeedNormViolation(format!(
                "||X_p||^2 = {norm:.12} on block {} but d_p/|G| = {target:.12}",
                block.label
            )));
        }
    }
    Ok(SeedVector {
        amplitudes: x,
        block_norms,
    })
}

/// One POVM outcome: a positive operator `sum_i |f_i><f_i|` labeled by the
/// group elements whose states it eliminates.
#[derive(Debug, Clone)]
pub struct PovmElement {
    label: String,
    members: Vec<GroupElement>,
    factors: Vec<CVec>,
}

impl PovmElement {
    pub fn new(label: String, members: Vec<GroupElement>, factors: Vec<CVec>) -> Self {
        PovmElement {
            label,
            members,
            factors,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Group elements whose orbit states this outcome eliminates (empty for
    /// a failure outcome).
    pub fn members(&self) -> &[GroupElement] {
        &self.members
    }

    pub fn factors(&self) -> &[CVec] {
        &self.factors
    }

    /// The dense matrix `sum_i |f_i><f_i|`.
    pub fn matrix(&self, dim: usize) -> CMat {
        let mut m = CMat::zeros(dim, dim);
        for f in &self.factors {
            linalg::add_outer(&mut m, f);
        }
        m
    }

    /// `<psi| Pi |psi> = sum_i |<f_i|psi>|^2`.
    pub fn expectation(&self, state: &CVec) -> f64 {
        self.factors.iter().map(|f| f.dotc(state).norm_sqr()).sum()
    }

    /// Rank of the element: eigenvalues of the factor Gram matrix above
    /// [`tol::RANK_EIG`]. The nonzero spectrum of `sum_i |f_i><f_i|` equals
    /// that of the Gram matrix `G_ij = <f_i|f_j>`, so this stays cheap for
    /// merged elements of any ambient dimension.
    pub fn rank(&self) -> usize {
        let k = self.factors.len();
        if k == 0 {
            return 0;
        }
        let mut gram = CMat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = self.factors[i].dotc(&self.factors[j]);
            }
        }
        linalg::hermitian_eigenvalues(&gram)
            .into_iter()
            .filter(|&l| l > tol::RANK_EIG)
            .count()
    }
}

/// A labeled POVM: positive elements summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(dim: usize, elements: Vec<PovmElement>) -> Self {
        Povm { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|e| e.label()).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.rank()).collect()
    }

    /// `sum_g Pi_g` as a dense matrix.
    pub fn completeness_matrix(&self) -> CMat {
        let mut sum = CMat::zeros(self.dim, self.dim);
        for e in &self.elements {
            for f in &e.factors {
                linalg::add_outer(&mut sum, f);
            }
        }
        sum
    }

    /// `max |sum_g Pi_g - I|`.
    pub fn completeness_residual(&self) -> f64 {
        linalg::identity_residual(&self.completeness_matrix())
    }
}

/// The covariant POVM `{ Gamma(g) |X><X| Gamma(g)^{-1} }`, one rank-one
/// element per group element. The seed's norm condition makes the orbit
/// complete; a completeness residual above [`tol::COMPLETENESS_BUILD`]
/// signals a bad seed or decomposition and is returned as an error.
pub fn covariant_povm(scenario: &EliminationScenario, seed: &SeedVector) -> Result<Povm> {
    let rep = scenario.rep();
    if seed.amplitudes().len() != rep.dim() {
        return Err(QelimError::InvalidParameter(
            "seed dimension differs from the representation".into(),
        ));
    }
    let elements = scenario
        .group()
        .elements()
        .map(|g| {
            PovmElement::new(
                scenario.group().label(g).to_string(),
                vec![g],
                vec![rep.apply(g, seed.amplitudes())],
            )
        })
        .collect();
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

/// Merges orbit elements over left cosets: one element per coset, equal to
/// the sum of its members' elements (the matrix sums are reassociated
/// only, so completeness is preserved). The merged element takes the coset
/// representative's label.
pub fn merge_by_cosets(povm: &Povm, partition: &CosetPartition) -> Result<Povm> {
    let total: usize = partition.cosets().iter().map(|c| c.len()).sum();
    if total != povm.len() {
        return Err(QelimError::InvalidPartition(format!(
            "partition covers {total} elements but the POVM has {}",
            povm.len()
        )));
    }
    let mut by_member: Vec<Option<usize>> = vec![None; total];
    for (i, e) in povm.elements().iter().enumerate() {
        match e.members() {
            [g] if g.0 < total && by_member[g.0].is_none() => by_member[g.0] = Some(i),
            _ => {
                return Err(QelimError::InvalidPartition(
                    "merge requires a POVM labeled by distinct single group elements".into(),
                ))
            }
        }
    }
    let mut merged = Vec::with_capacity(partition.len());
    for (coset, rep_el) in partition.cosets().iter().zip(partition.representatives()) {
        let mut factors = Vec::with_capacity(coset.len());
        let mut label = String::new();
        for &m in coset {
            let idx = by_member[m.0].ok_or_else(|| {
                QelimError::InvalidPartition(format!(
                    "partition references missing element {}",
                    m.0
                ))
            })?;
            if m == *rep_el {
                label = povm.elements()[idx].label().to_string();
            }
            factors.extend(povm.elements()[idx].factors().iter().cloned());
        }
        merged.push(PovmElement::new(label, coset.clone(), factors));
    }
    Ok(Povm::new(povm.dim(), merged))
}

/// Result of [`verify_povm`]: completeness and positivity residuals.
#[derive(Debug, Clone)]
pub struct PovmReport {
    pub completeness_residual: f64,
    /// Smallest eigenvalue over all elements. For dimensions above 64 this
    /// is a certified lower bound from the factored form (an element
    /// assembled as `sum_i |f_i><f_i|` cannot dip below rounding noise)
    /// rather than a dense eigensolve.
    pub min_eigenvalue: f64,
    pub element_ranks: Vec<usize>,
    pub pass: bool,
}

/// Checks completeness (`<= 1e-10`) and element positivity
/// (`min eig >= -1e-10`), reporting the worst residuals found.
pub fn verify_povm(povm: &Povm) -> PovmReport {
    let completeness_residual = povm.completeness_residual();
    let mut min_eigenvalue = f64::INFINITY;
    for e in povm.elements() {
        let lo = if povm.dim() <= 64 {
            *linalg::hermitian_eigenvalues(&e.matrix(povm.dim()))
                .first()
                .unwrap_or(&0.0)
        } else {
            let weight: f64 = e.factors().iter().map(|f| f.norm_squared()).sum();
            -(e.factors().len().max(1) as f64) * f64::EPSILON * weight
        };
        min_eigenvalue = min_eigenvalue.min(lo);
    }
    if povm.is_empty() {
        min_eigenvalue = 0.0;
    }
    let pass = completeness_residual <= tol::DERIVED && min_eigenvalue >= -tol::DERIVED;
    PovmReport {
        completeness_residual,
        min_eigenvalue,
        element_ranks: povm.ranks(),
        pass,
    }
}

/// Result of [`verify_elimination`]: the largest probability assigned by
/// any outcome to a state it claims to eliminate.
#[derive(Debug, Clone)]
pub struct EliminationReport {
    pub max_probability: f64,
    /// Worst probability per outcome, in element order.
    pub per_outcome: Vec<(String, f64)>,
    pub pass: bool,
}

/// For each outcome labeled by members `gH`, checks that every state
/// `Gamma(gh) |psi_e>` in its eliminated set has outcome probability at
/// most 1e-10.
pub fn verify_elimination(povm: &Povm, scenario: &EliminationScenario) -> EliminationReport {
    let mut per_outcome = Vec::with_capacity(povm.len());
    let mut max_probability = 0.0f64;
    for e in povm.elements() {
        let worst = e
            .members()
            .iter()
            .map(|&m| e.expectation(&scenario.state(m)))
            .fold(0.0, f64::max);
        max_probability = max_probability.max(worst);
        per_outcome.push((e.label().to_string(), worst));
    }
    EliminationReport {
        max_probability,
        per_outcome,
        pass: max_probability <= tol::DERIVED,
    }
}

/// Born probabilities `p(label) = <psi| Pi_label |psi>` for a unit state.
/// The result is componentwise nonnegative; it sums to one exactly when
/// the POVM is complete.
pub fn born_probabilities(povm: &Povm, state: &CVec) -> Result<Vec<f64>> {
    if state.len() != povm.dim() {
        return Err(QelimError::InvalidParameter(
            "state dimension differs from the POVM".into(),
        ));
    }
    if (state.norm() - 1.0).abs() > tol::CONSTRUCTION {
        return Err(QelimError::InvalidParameter(format!(
            "state is not normalized: ||psi|| = {}",
            state.norm()
        )));
    }
    Ok(povm
        .elements()
        .iter()
        .map(|e| e.expectation(state))
        .collect())
}

/// Outcome counts from a seeded multinomial draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSample {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

/// Samples `shots` outcomes from the Born distribution with a deterministic
/// ChaCha8 stream seeded by `seed` (the draw is inverse-CDF over 53-bit
/// uniforms, so counts reproduce bit-exactly across platforms).
/// Probabilities below 1e-12 are clamped to zero before normalization, so
/// eliminated outcomes can never fire.
pub fn sample_outcomes(povm: &Povm, state: &CVec, shots: u64, seed: u64) -> Result<OutcomeSample> {
    if shots == 0 {
        return Err(QelimError::InvalidParameter("shots must be >= 1".into()));
    }
    let mut probs = born_probabilities(povm, state)?;
    for p in probs.iter_mut() {
        if *p < 1e-12 {
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(QelimError::NumericalFailure(
            "all outcome probabilities vanish".into(),
        ));
    }
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0f64, |acc, &p| {
            *acc += p / total;
            Some(*acc)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; povm.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let idx = cdf.partition_point(|&c| c <= u).min(povm.len() - 1);
        counts[idx] += 1;
    }
    Ok(OutcomeSample {
        labels: povm.labels().iter().map(|s| s.to_string()).collect(),
        counts,
        shots,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_cyclic;
    use crate::repr::{character_table, decompose, rep_rotation_z3};

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    fn trine() -> (EliminationScenario, SeedVector, Povm) {
        let rep = rep_rotation_z3();
        let table = character_table(rep.group()).unwrap();
        let decomp = decompose(&rep, &table).unwrap();
        let fiducial = CVec::from_vec(vec![ONE, ZERO]);
        let h = Subgroup::trivial(rep.group().clone());
        let scenario = EliminationScenario::new(rep, fiducial, h).unwrap();
        let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        let seed = build_seed(&decomp, &[a, -a]).unwrap();
        let povm = covariant_povm(&scenario, &seed).unwrap();
        (scenario, seed, povm)
    }

    #[test]
    fn trine_seed_is_i_sqrt_two_thirds_one() {
        let (_, seed, _) = trine();
        let expected = CVec::from_vec(vec![ZERO, Complex64::new(0.0, (2.0f64 / 3.0).sqrt())]);
        assert!(linalg::diff_up_to_phase(seed.amplitudes(), &expected) < 1e-14);
    }

    #[test]
    fn trine_povm_is_anti_trine() {
        let (scenario, _, povm) = trine();
        assert_eq!(povm.len(), 3);
        // Elements are (2/3) projectors onto the anti-trine states.
        let h = 3f64.sqrt() / 2.0;
        let anti = [
            CVec::from_vec(vec![ZERO, ONE]),
            CVec::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(-0.5, 0.0)]),
            CVec::from_vec(vec![Complex64::new(-h, 0.0), Complex64::new(-0.5, 0.0)]),
        ];
        for (e, a) in povm.elements().iter().zip(&anti) {
            let m = e.matrix(2);
            let target = linalg::outer(a) * Complex64::new(2.0 / 3.0, 0.0);
            assert!(linalg::max_diff(&m, &target) < 1e-13);
        }
        let report = verify_povm(&povm);
        assert!(report.pass && report.completeness_residual < 1e-13);
        let elim = verify_elimination(&povm, &scenario);
        assert!(elim.pass && elim.max_probability < 1e-20);
    }

    #[test]
    fn trine_born_probabilities_from_zero_state() {
        let (_, _, povm) = trine();
        let zero = CVec::from_vec(vec![ONE, ZERO]);
        let p = born_probabilities(&povm, &zero).unwrap();
        assert!(p[0].abs() < 1e-15);
        assert!((p[1] - 0.5).abs() < 1e-13 && (p[2] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn born_probabilities_of_identity_povm() {
        let povm = Povm::new(
            2,
            vec![PovmElement::new(
                "all".into(),
                vec![],
                vec![
                    CVec::from_vec(vec![ONE, ZERO]),
                    CVec::from_vec(vec![ZERO, ONE]),
                ],
            )],
        );
        let s = 0.5f64.sqrt();
        let state = CVec::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
        let p = born_probabilities(&povm, &state).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn build_seed_rejects_zero_amplitudes() {
        let rep = rep_rotation_z3();
        let table = character_table(rep.group()).unwrap();
        let decomp = decompose(&rep, &table).unwrap();
        let err = build_seed(&decomp, &[ZERO, ZERO]);
        assert!(matches!(err, Err(QelimError::SeedNormViolation(_))));
    }

    #[test]
    fn verify_povm_flags_deleted_element() {
        let (_, _, povm) = trine();
        let crippled = Povm::new(2, povm.elements()[1..].to_vec());
        let report = verify_povm(&crippled);
        assert!(!report.pass);
        assert!(
            report.completeness_residual > 0.5,
            "residual is about ||Pi_e||"
        );
    }

    #[test]
    fn merge_with_trivial_partition_is_identity() {
        let (scenario, _, povm) = trine();
        let partition = scenario.coset_partition().unwrap();
        let merged = merge_by_cosets(&povm, &partition).unwrap();
        assert_eq!(merged.len(), povm.len());
        for (a, b) in merged.elements().iter().zip(povm.elements()) {
            assert_eq!(a.label(), b.label());
            assert!(linalg::max_diff(&a.matrix(2), &b.matrix(2)) < 1e-15);
        }
    }

    #[test]
    fn covariance_of_trine_povm() {
        let (scenario, _, povm) = trine();
        let rep = scenario.rep();
        for gp in scenario.group().elements() {
            let u = rep.matrix(gp);
            for g in scenario.group().elements() {
                let gg = scenario.group().mul(gp, g);
                let transported = &u * povm.elements()[g.0].matrix(2) * u.adjoint();
                assert!(linalg::max_diff(&transported, &povm.elements()[gg.0].matrix(2)) < 1e-13);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_respects_elimination() {
        let (_, _, povm) = trine();
        let zero = CVec::from_vec(vec![ONE, ZERO]);
        let a = sample_outcomes(&povm, &zero, 100_000, 7).unwrap();
        let b = sample_outcomes(&povm, &zero, 100_000, 7).unwrap();
        assert_eq!(a, b, "fixed seed reproduces counts exactly");
        assert_eq!(a.counts[0], 0, "eliminated outcome never fires");
        assert_eq!(a.counts.iter().sum::<u64>(), 100_000);
        // Both live outcomes within 3 sigma of 50_000.
        let sigma = (100_000.0f64 * 0.25).sqrt();
        for &c in &a.counts[1..] {
            assert!((c as f64 - 50_000.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn sample_rejects_zero_shots() {
        let (_, _, povm) = trine();
        let zero = CVec::from_vec(vec![ONE, ZERO]);
        assert!(matches!(
            sample_outcomes(&povm, &zero, 0, 1),
            Err(QelimError::InvalidParameter(_))
        ));
    }

    #[test]
    fn merge_rejects_wrong_partition() {
        let (_, _, povm) = trine();
        let z4 = Arc::new(build_cyclic(4).unwrap());
        let h = Subgroup::trivial(z4.clone());
        let partition = crate::group::left_cosets(&z4, &h).unwrap();
        assert!(matches!(
            merge_by_cosets(&povm, &partition),
            Err(QelimError::InvalidPartition(_))
        ));
    }
}
