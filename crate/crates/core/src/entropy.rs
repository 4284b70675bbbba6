//! Von Neumann entropy, the Holevo feasibility constraint on set
//! elimination, closed-form four-qubit entropies, and the minimum-mutual-
//! information verification.
//!
//! All logarithms are base 2; entropies are reported in bits.
//!
//! The feasibility constraint: a measurement eliminating one of M equally
//! likely, equally sized, non-overlapping state sets conveys at least
//! `log2(M/(M-1))` bits about which set was sent, and the Holevo bound
//! caps the conveyable information at `S(rho) - (1/M) sum_x S(rho_x)`.
//! Sets whose Holevo gap falls below the bound therefore admit no such
//! measurement.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::error::{QelimError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::repr::IrrepDecomposition;
use crate::tol;

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// A validated density matrix: Hermitian, unit trace, positive
/// semidefinite (eigenvalues above -1e-10, clamped to zero for entropy).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(QelimError::InvalidDensityMatrix(
                "matrix must be square and nonempty".into(),
            ));
        }
        let herm = linalg::max_diff(&matrix, &matrix.adjoint());
        if herm > tol::CONSTRUCTION {
            return Err(QelimError::InvalidDensityMatrix(format!(
                "not Hermitian: residual {herm:.3e}"
            )));
        }
        let trace: Complex64 = matrix.diagonal().sum();
        if (trace - Complex64::new(1.0, 0.0)).norm() > tol::CONSTRUCTION {
            return Err(QelimError::InvalidDensityMatrix(format!(
                "trace = {trace} differs from 1"
            )));
        }
        let eigenvalues: Vec<f64> = linalg::hermitian_eigenvalues(&matrix)
            .into_iter()
            .map(|l| {
                if (-tol::DERIVED..0.0).contains(&l) {
                    0.0
                } else {
                    l
                }
            })
            .collect();
        if eigenvalues.first().is_some_and(|&l| l < 0.0) {
            return Err(QelimError::InvalidDensityMatrix(format!(
                "negative eigenvalue {:.3e}",
                eigenvalues[0]
            )));
        }
        Ok(DensityMatrix {
            matrix,
            eigenvalues,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Eigenvalues ascending, clamped into [0, 1].
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// `S(rho) = -sum_i lambda_i log2 lambda_i`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -rho.eigenvalues().iter().map(|&l| xlog2x(l)).sum::<f64>()
}

/// The uniform mixture `(1/K) sum_z |psi_z><psi_z|` of unit vectors.
pub fn mixed_state_of_set(states: &[CVec]) -> Result<DensityMatrix> {
    if states.is_empty() {
        return Err(QelimError::InvalidParameter(
            "need at least one state".into(),
        ));
    }
    let d = states[0].len();
    let mut rho = CMat::zeros(d, d);
    for s in states {
        if s.len() != d {
            return Err(QelimError::InvalidParameter(
                "states have mixed dimensions".into(),
            ));
        }
        linalg::add_outer(&mut rho, s);
    }
    rho /= Complex64::new(states.len() as f64, 0.0);
    DensityMatrix::new(rho)
}

/// `I(X:Y) = sum_xy p(x,y) log2[p(x,y) / (p_X(x) p_Y(y))]`, with
/// zero-probability cells contributing zero.
pub fn mutual_information(joint: &DMatrix<f64>) -> Result<f64> {
    if joint.iter().any(|&p| p < 0.0) {
        return Err(QelimError::InvalidParameter(
            "joint distribution has negative entries".into(),
        ));
    }
    let total: f64 = joint.iter().sum();
    if (total - 1.0).abs() > tol::DERIVED {
        return Err(QelimError::InvalidParameter(format!(
            "joint distribution sums to {total}, not 1"
        )));
    }
    let px: Vec<f64> = (0..joint.nrows()).map(|x| joint.row(x).sum()).collect();
    let py: Vec<f64> = (0..joint.ncols()).map(|y| joint.column(y).sum()).collect();
    let mut info = 0.0;
    for x in 0..joint.nrows() {
        for y in 0..joint.ncols() {
            let p = joint[(x, y)];
            if p > 0.0 {
                info += p * (p / (px[x] * py[y])).log2();
            }
        }
    }
    Ok(info)
}

/// Output of [`holevo_check`]: the Holevo gap against the elimination
/// bound `log2(M/(M-1))`.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    /// `S(rho)` of the overall mixture, in bits.
    pub s_rho: f64,
    /// `S(rho_x)` per set, in bits.
    pub s_sets: Vec<f64>,
    /// `S(rho) - (1/M) sum_x S(rho_x)`.
    pub holevo_gap: f64,
    /// `log2(M/(M-1))`.
    pub bound: f64,
    /// Whether the necessary condition `holevo_gap >= bound` holds.
    pub feasible: bool,
}

/// Evaluates the necessary condition for an M-set elimination measurement:
/// `log2(M/(M-1)) <= S(rho) - (1/M) sum_x S(rho_x)` for equally likely,
/// equally sized, non-overlapping sets.
pub fn holevo_check(sets: &[Vec<CVec>]) -> Result<EntropyReport> {
    let m = sets.len();
    if m < 2 {
        return Err(QelimError::InvalidPartition(
            "need at least two sets".into(),
        ));
    }
    let k = sets[0].len();
    if k == 0 || sets.iter().any(|s| s.len() != k) {
        return Err(QelimError::InvalidPartition(
            "sets must be nonempty and equally sized".into(),
        ));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            for a in &sets[i] {
                for b in &sets[j] {
                    if (a.dotc(b).norm() - 1.0).abs() < tol::CONSTRUCTION {
                        return Err(QelimError::InvalidPartition(format!(
                            "sets {i} and {j} share a state"
                        )));
                    }
                }
            }
        }
    }
    let all: Vec<CVec> = sets.iter().flatten().cloned().collect();
    let s_rho = von_neumann_entropy(&mixed_state_of_set(&all)?);
    let s_sets: Vec<f64> = sets
        .iter()
        .map(|set| Ok(von_neumann_entropy(&mixed_state_of_set(set)?)))
        .collect::<Result<_>>()?;
    let holevo_gap = s_rho - s_sets.iter().sum::<f64>() / m as f64;
    let bound = (m as f64 / (m as f64 - 1.0)).log2();
    Ok(EntropyReport {
        s_rho,
        s_sets,
        holevo_gap,
        feasible: holevo_gap >= bound - tol::CONSTRUCTION,
        bound,
    })
}

/// Closed-form entropy of the uniform orbit mixture,
/// `S(rho) = -sum_p ||psi_ep||^2 log2(||psi_ep||^2 / d_p)`, from the
/// fiducial's per-block squared norms.
pub fn entropy_rho_group(decomp: &IrrepDecomposition, fiducial: &CVec) -> Result<f64> {
    if fiducial.len() != decomp.dim() {
        return Err(QelimError::InvalidParameter(
            "fiducial dimension differs from the decomposition".into(),
        ));
    }
    let norms = decomp.component_norms(fiducial);
    let mut s = 0.0;
    for (norm, block) in norms.iter().zip(decomp.blocks()) {
        if *norm > 0.0 {
            s -= norm * (norm / block.dim as f64).log2();
        }
    }
    Ok(s)
}

/// Closed forms for the four-qubit coset scenario at `s = sin²θ`:
/// the overall entropy
/// `S(rho) = -sum_n C(4,n) s^n (1-s)^(4-n) log2[s^n (1-s)^(4-n)]`
/// and the per-coset entropy (with `v = 1 - 2s`)
/// `S(rho_e) = -(1/2)(1-v^4) log2(1-v^4) - (1/4)(1+v^2)^2 log2(1+v^2)^2
///             -(1/4)(1-v^2)^2 log2(1-v^2)^2 + 2`.
pub fn four_qubit_entropies(s: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.5).contains(&s) {
        return Err(QelimError::InvalidParameter(format!(
            "s = {s} outside [0, 1/2]"
        )));
    }
    let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
    let mut s_rho = 0.0;
    for (n, c) in binom.iter().enumerate() {
        let p = s.powi(n as i32) * (1.0 - s).powi(4 - n as i32);
        if p > 0.0 {
            s_rho -= c * p * p.log2();
        }
    }
    let v = 1.0 - 2.0 * s;
    let v2 = v * v;
    let s_rho_e = 2.0
        - 0.5 * xlog2x(1.0 - v2 * v2)
        - 0.25 * xlog2x((1.0 + v2) * (1.0 + v2))
        - 0.25 * xlog2x((1.0 - v2) * (1.0 - v2));
    Ok((s_rho, s_rho_e))
}

/// The four-qubit feasibility gap `S(rho) - S(rho_e)` at `s = sin²θ`
/// (all four coset densities are unitarily related, so one per-set entropy
/// suffices).
pub fn four_qubit_gap(s: f64) -> Result<f64> {
    let (s_rho, s_rho_e) = four_qubit_entropies(s)?;
    Ok(s_rho - s_rho_e)
}

/// The smallest `s = sin²θ` at which the four-set elimination condition
/// can hold: the bisection root of `gap(s) = log2(4/3)` on (0, 1/2],
/// located to `|Δs| <= 1e-8`.
pub fn threshold_s() -> Result<f64> {
    let bound = (4.0f64 / 3.0).log2();
    let (mut lo, mut hi) = (1e-6, 0.5);
    if four_qubit_gap(lo)? >= bound || four_qubit_gap(hi)? <= bound {
        return Err(QelimError::NumericalFailure(
            "threshold bracket has no sign change".into(),
        ));
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if four_qubit_gap(mid)? < bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of the feasibility plot data.
#[derive(Debug, Clone)]
pub struct Figure1Row {
    pub s: f64,
    pub gap: f64,
    pub bound: f64,
}

/// Feasibility-plot rows (s, gap, bound) over a grid in [0, 1/2]. On an
/// increasing grid the gap is checked to be monotone increasing.
pub fn figure1_data(s_grid: &[f64]) -> Result<Vec<Figure1Row>> {
    let bound = (4.0f64 / 3.0).log2();
    let rows: Vec<Figure1Row> = s_grid
        .iter()
        .map(|&s| {
            Ok(Figure1Row {
                s,
                gap: four_qubit_gap(s)?,
                bound,
            })
        })
        .collect::<Result<_>>()?;
    let increasing_grid = s_grid.windows(2).all(|w| w[1] > w[0]);
    if increasing_grid {
        for w in rows.windows(2) {
            if w[1].gap < w[0].gap - tol::DERIVED {
                return Err(QelimError::NumericalFailure(format!(
                    "gap not monotone between s = {} and s = {}",
                    w[0].s, w[1].s
                )));
            }
        }
    }
    Ok(rows)
}

/// Conditional probabilities `q_yx = p(y|x)` of an eliminator: the
/// diagonal is structurally zero and each column sums to one.
#[derive(Debug, Clone)]
pub struct ConditionalModel {
    m: usize,
    /// Rows y, columns x.
    q: DMatrix<f64>,
}

impl ConditionalModel {
    pub fn new(q: DMatrix<f64>) -> Result<Self> {
        let m = q.nrows();
        if m < 2 || q.ncols() != m {
            return Err(QelimError::InvalidParameter(
                "model must be square with M >= 2".into(),
            ));
        }
        for x in 0..m {
            if q[(x, x)] != 0.0 {
                return Err(QelimError::InvalidParameter(
                    "diagonal must be structurally zero".into(),
                ));
            }
            let col: f64 = q.column(x).sum();
            if (col - 1.0).abs() > tol::DERIVED {
                return Err(QelimError::InvalidParameter(format!(
                    "column {x} sums to {col}, not 1"
                )));
            }
            if q.column(x).iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(QelimError::InvalidParameter(
                    "entries must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(ConditionalModel { m, q })
    }

    /// The uniform eliminator `q_yx = 1/(M-1)` for `y != x`.
    pub fn uniform(m: usize) -> Self {
        let v = 1.0 / (m as f64 - 1.0);
        let q = DMatrix::from_fn(m, m, |y, x| if y == x { 0.0 } else { v });
        ConditionalModel { m, q }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// The joint `p(x, y) = q_yx / M` (inputs uniform), rows x.
    pub fn joint(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |x, y| self.q[(y, x)] / self.m as f64)
    }

    pub fn mutual_information_bits(&self) -> Result<f64> {
        mutual_information(&self.joint())
    }
}

/// Result of [`min_mutual_information`]: the analytic minimum and the
/// worst deviations seen across the random-start numerical minimizations.
#[derive(Debug, Clone)]
pub struct MinMutualInfo {
    /// `log2(M/(M-1))`.
    pub analytic_bits: f64,
    /// `1/(M-1)`.
    pub uniform_q: f64,
    /// Largest minimized objective across starts.
    pub numeric_bits: f64,
    /// Largest entrywise `|q - uniform|` across starts.
    pub max_q_deviation: f64,
    pub starts: usize,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        css += uj;
        let t = (1.0 - css) / (j + 1) as f64;
        if uj + t > 0.0 {
            tau = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x + tau).max(0.0);
    }
}

/// The minimum mutual information of an M-set eliminator.
///
/// The analytic answer is the contract: the uniform conditional model
/// `q_yx = 1/(M-1)` attains `I = log2(M/(M-1))`. As a cross-check, the
/// objective is minimized numerically by simplex-projected gradient
/// descent with a fixed step schedule from `starts` seeded random starts;
/// failure of any start to reach the uniform model within 1e-4 (and the
/// analytic value within 1e-6) is reported as an error.
pub fn min_mutual_information(m: usize, starts: usize) -> Result<MinMutualInfo> {
    if m < 2 {
        return Err(QelimError::InvalidParameter("M must be >= 2".into()));
    }
    let analytic = (m as f64 / (m as f64 - 1.0)).log2();
    let uniform = 1.0 / (m as f64 - 1.0);
    let mut worst_i = f64::NEG_INFINITY;
    let mut worst_dev = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0C0F_FEE0);
    for start in 0..starts {
        let mut q = DMatrix::zeros(m, m);
        for x in 0..m {
            let mut col: Vec<f64> = (0..m - 1).map(|_| rng.gen::<f64>() + 0.05).collect();
            let total: f64 = col.iter().sum();
            col.iter_mut().for_each(|v| *v /= total);
            let mut i = 0;
            for y in 0..m {
                if y != x {
                    q[(y, x)] = col[i];
                    i += 1;
                }
            }
        }
        for k in 0..12_000 {
            let eta = match k {
                0..=499 => 0.5,
                500..=1999 => 0.1,
                2000..=4999 => 0.02,
                _ => 0.005,
            };
            let py: Vec<f64> = (0..m).map(|y| q.row(y).sum() / m as f64).collect();
            for x in 0..m {
                let mut col: Vec<f64> = Vec::with_capacity(m - 1);
                for y in 0..m {
                    if y != x {
                        let g = (q[(y, x)].max(1e-12) / py[y].max(1e-300)).log2() / m as f64;
                        col.push(q[(y, x)] - eta * g);
                    }
                }
                project_simplex(&mut col);
                let mut i = 0;
                for y in 0..m {
                    if y != x {
                        q[(y, x)] = col[i];
                        i += 1;
                    }
                }
            }
        }
        let model = ConditionalModel::new(q.clone())?;
        let value = model.mutual_information_bits()?;
        let dev = (0..m)
            .flat_map(|x| (0..m).filter(move |&y| y != x).map(move |y| (y, x)))
            .map(|(y, x)| (q[(y, x)] - uniform).abs())
            .fold(0.0, f64::max);
        if dev > 1e-4 || (value - analytic).abs() > 1e-6 {
            return Err(QelimError::NumericalFailure(format!(
                "start {start} converged to |q - uniform| = {dev:.3e}, |I - Imin| = {:.3e}",
                (value - analytic).abs()
            )));
        }
        worst_i = worst_i.max(value);
        worst_dev = worst_dev.max(dev);
    }
    Ok(MinMutualInfo {
        analytic_bits: analytic,
        uniform_q: uniform,
        numeric_bits: worst_i,
        max_q_deviation: worst_dev,
        starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn entropy_of_pure_and_mixed_states() {
        let pure = DensityMatrix::new(linalg::outer(&CVec::from_vec(vec![ONE, ZERO]))).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);

        let mixed = DensityMatrix::new(linalg::identity(2) / Complex64::new(2.0, 0.0)).unwrap();
        assert!((von_neumann_entropy(&mixed) - 1.0).abs() < 1e-12);

        let diag = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.25, 0.0),
            Complex64::new(0.25, 0.0),
        ]));
        let rho = DensityMatrix::new(diag).unwrap();
        assert!((von_neumann_entropy(&rho) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = linalg::identity(2);
        assert!(matches!(
            DensityMatrix::new(bad_trace),
            Err(QelimError::InvalidDensityMatrix(_))
        ));
        let mut not_herm = linalg::identity(2) / Complex64::new(2.0, 0.0);
        not_herm[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(matches!(
            DensityMatrix::new(not_herm),
            Err(QelimError::InvalidDensityMatrix(_))
        ));
    }

    #[test]
    fn mixed_state_of_orthogonal_pair_is_maximally_mixed() {
        let states = [
            CVec::from_vec(vec![ONE, ZERO]),
            CVec::from_vec(vec![ZERO, ONE]),
        ];
        let rho = mixed_state_of_set(&states).unwrap();
        assert!(
            linalg::max_diff(
                rho.matrix(),
                &(linalg::identity(2) / Complex64::new(2.0, 0.0))
            ) < 1e-15
        );
    }

    #[test]
    fn mutual_information_basics() {
        let product = DMatrix::from_fn(2, 2, |_, _| 0.25);
        assert!(mutual_information(&product).unwrap().abs() < 1e-14);

        let correlated = DMatrix::from_fn(2, 2, |x, y| if x == y { 0.5 } else { 0.0 });
        assert!((mutual_information(&correlated).unwrap() - 1.0).abs() < 1e-13);

        // Uniform eliminator with M = 4.
        let model = ConditionalModel::uniform(4);
        let i = model.mutual_information_bits().unwrap();
        assert!((i - (4.0f64 / 3.0).log2()).abs() < 1e-13);
    }

    #[test]
    fn holevo_orthonormal_singletons() {
        let sets = vec![
            vec![CVec::from_vec(vec![ONE, ZERO])],
            vec![CVec::from_vec(vec![ZERO, ONE])],
        ];
        let report = holevo_check(&sets).unwrap();
        assert!((report.holevo_gap - 1.0).abs() < 1e-12, "gap = log2 M = 1");
        assert!(report.feasible);
    }

    #[test]
    fn holevo_rejects_shared_state() {
        let v = CVec::from_vec(vec![ONE, ZERO]);
        let sets = vec![vec![v.clone()], vec![v]];
        assert!(matches!(
            holevo_check(&sets),
            Err(QelimError::InvalidPartition(_))
        ));
    }

    #[test]
    fn four_qubit_entropy_endpoints() {
        let (s0, se0) = four_qubit_entropies(0.0).unwrap();
        assert!(s0.abs() < 1e-12 && se0.abs() < 1e-12);
        let (s5, se5) = four_qubit_entropies(0.5).unwrap();
        assert!((s5 - 4.0).abs() < 1e-12 && (se5 - 2.0).abs() < 1e-12);
        assert!(four_qubit_entropies(0.6).is_err());
    }

    #[test]
    fn threshold_matches_reported_band() {
        let s = threshold_s().unwrap();
        assert!((0.07..=0.09).contains(&s), "s* = {s}");
        let gap = four_qubit_gap(s).unwrap();
        assert!(
            (gap - (4.0f64 / 3.0).log2()).abs() < 1e-7,
            "root definition"
        );
        let deg = s.sqrt().asin().to_degrees();
        assert!(
            (deg - 16.0).abs() < 1.0,
            "angle {deg} within a degree of 16"
        );
    }

    #[test]
    fn figure1_rows_bracket_threshold() {
        let grid: Vec<f64> = (0..=100).map(|i| 0.5 * i as f64 / 100.0).collect();
        let rows = figure1_data(&grid).unwrap();
        assert!(rows[0].gap.abs() < 1e-12);
        let s_star = threshold_s().unwrap();
        let crossing = rows
            .windows(2)
            .find(|w| w[0].gap < w[0].bound && w[1].gap >= w[1].bound);
        let w = crossing.expect("gap crosses the bound once");
        assert!(w[0].s <= s_star && s_star <= w[1].s);
        // Above the threshold the gap stays above the bound.
        assert!(rows.iter().filter(|r| r.s > 0.25).all(|r| r.gap > r.bound));
    }

    #[test]
    fn orbit_entropy_closed_form_matches_explicit_mixture() {
        use crate::solvers::{
            d3_scenario, four_qubit_quads_scenario, n_qubit_scenario, three_qubit_pairs_scenario,
            trine_scenario, two_qubit_scenario,
        };
        let scenarios = vec![
            trine_scenario().unwrap(),
            two_qubit_scenario(0.5).unwrap(),
            three_qubit_pairs_scenario(0.7).unwrap(),
            four_qubit_quads_scenario(0.7).unwrap(),
            n_qubit_scenario(0.6, 3).unwrap(),
            d3_scenario().unwrap(),
        ];
        for inst in &scenarios {
            let closed = entropy_rho_group(&inst.decomposition, inst.scenario.fiducial()).unwrap();
            let explicit =
                von_neumann_entropy(&mixed_state_of_set(&inst.scenario.states()).unwrap());
            assert!(
                (closed - explicit).abs() < 1e-9,
                "{}: closed {closed} vs explicit {explicit}",
                inst.kind
            );
        }
    }

    #[test]
    fn orbit_entropy_matches_for_random_fiducials() {
        use rand::Rng as _;
        use rand::SeedableRng as _;
        let inst = crate::solvers::two_qubit_scenario(0.5).unwrap();
        let rep = inst.scenario.rep();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..25 {
            let mut v = CVec::from_fn(4, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            v /= Complex64::new(v.norm(), 0.0);
            let orbit: Vec<CVec> = rep.group().elements().map(|g| rep.apply(g, &v)).collect();
            let closed = entropy_rho_group(&inst.decomposition, &v).unwrap();
            let explicit = von_neumann_entropy(&mixed_state_of_set(&orbit).unwrap());
            assert!((closed - explicit).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_entropy_vanishes_inside_one_block() {
        let rep = crate::repr::rep_reflection_qubit();
        let table = crate::repr::character_table(rep.group()).unwrap();
        let decomp = crate::repr::decompose(&rep, &table).unwrap();
        let zero = CVec::from_vec(vec![ONE, ZERO]);
        assert!(entropy_rho_group(&decomp, &zero).unwrap().abs() < 1e-15);
    }

    #[test]
    fn feasibility_holds_across_pair_scenario_range() {
        for i in 0..12 {
            let t2 = 1.0 / 3.0 + (3.0 - 1.0 / 3.0) * i as f64 / 11.0;
            let inst = crate::solvers::three_qubit_pairs_scenario(t2.sqrt().atan()).unwrap();
            let report = holevo_check(&inst.scenario.state_sets().unwrap()).unwrap();
            assert!(report.feasible, "feasible at tan² = {t2}");
        }
    }

    #[test]
    fn coset_densities_share_entropy() {
        for inst in [
            crate::solvers::three_qubit_pairs_scenario(0.7).unwrap(),
            crate::solvers::four_qubit_quads_scenario(0.7).unwrap(),
        ] {
            let entropies: Vec<f64> = inst
                .scenario
                .state_sets()
                .unwrap()
                .iter()
                .map(|set| von_neumann_entropy(&mixed_state_of_set(set).unwrap()))
                .collect();
            let spread = entropies.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - entropies.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            assert!(
                spread <= 1e-10,
                "unitarily related densities: spread {spread:.3e}"
            );
        }
    }

    #[test]
    fn four_qubit_feasibility_flips_across_threshold() {
        // The coset state sets exist at any theta even where the POVM
        // construction does not; the Holevo condition decides feasibility.
        let sets_at = |s: f64| -> Vec<Vec<CVec>> {
            let theta = s.sqrt().asin();
            let patterns: [[bool; 4]; 4] = [
                [false, false, false, false],
                [false, false, true, true],
                [true, true, false, false],
                [true, true, true, true],
            ];
            let flip = |base: [bool; 4], mask: [bool; 4]| {
                let mut out = [false; 4];
                for i in 0..4 {
                    out[i] = base[i] ^ mask[i];
                }
                out
            };
            let reps: [[bool; 4]; 4] = [
                [false, false, false, false],
                [false, false, false, true],
                [false, true, false, false],
                [false, true, false, true],
            ];
            reps.iter()
                .map(|&r| {
                    patterns
                        .iter()
                        .map(|&h| crate::solvers::fiducial_state(theta, &flip(r, h)))
                        .collect()
                })
                .collect()
        };
        let low = holevo_check(&sets_at(0.02)).unwrap();
        assert!(!low.feasible, "s = 0.02 sits below the threshold");
        let high = holevo_check(&sets_at(0.25)).unwrap();
        assert!(high.feasible, "s = 0.25 sits above the threshold");
    }

    #[test]
    fn min_mutual_information_small_m() {
        for m in [2usize, 3, 4] {
            let r = min_mutual_information(m, 20).unwrap();
            assert!(r.max_q_deviation <= 1e-4);
            assert!((r.numeric_bits - r.analytic_bits).abs() <= 1e-6);
        }
        // M = 2 forces q = 1 exactly.
        let r = min_mutual_information(2, 5).unwrap();
        assert!((r.analytic_bits - 1.0).abs() < 1e-15);
        assert!((r.uniform_q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conditional_model_validation() {
        let mut q = DMatrix::zeros(3, 3);
        q[(1, 0)] = 0.7;
        q[(2, 0)] = 0.3;
        q[(0, 1)] = 0.5;
        q[(2, 1)] = 0.5;
        q[(0, 2)] = 1.0;
        assert!(ConditionalModel::new(q.clone()).is_ok());
        q[(1, 2)] = 0.5;
        assert!(ConditionalModel::new(q).is_err(), "column 2 sums above 1");
    }
}
