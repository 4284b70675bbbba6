//! Small dense complex linear algebra helpers shared by the other modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Largest entry magnitude of a matrix (max norm).
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest component magnitude of a vector.
pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-norm distance between two matrices.
pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Residual of `m` against the identity, `max |m - I|`.
pub fn identity_residual(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// Accumulate the outer product `v v†` into `acc`.
pub fn add_outer(acc: &mut CMat, v: &CVec) {
    let d = v.len();
    for j in 0..d {
        let cj = v[j].conj();
        for i in 0..d {
            acc[(i, j)] += v[i] * cj;
        }
    }
}

/// `v v†` as a dense matrix.
pub fn outer(v: &CVec) -> CMat {
    let mut m = CMat::zeros(v.len(), v.len());
    add_outer(&mut m, v);
    m
}

/// Eigenvalues (ascending) and matching eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, Vec<CVec>) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| CVec::from_column_slice(se.eigenvectors.column(i).as_slice()))
        .collect();
    (vals, vecs)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut vals: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Rotate `v` by a global phase so its largest-magnitude component is real
/// and positive. Ties (within a relative 1e-9) resolve to the lowest index,
/// which keeps the choice stable under rounding.
pub fn phase_fix(v: &mut CVec) {
    let max = max_abs_vec(v);
    if max == 0.0 {
        return;
    }
    let k = (0..v.len())
        .find(|&i| v[i].norm() >= max * (1.0 - 1e-9))
        .expect("nonzero vector has a maximal component");
    let phase = v[k] / v[k].norm();
    let corr = phase.conj();
    for z in v.iter_mut() {
        *z *= corr;
    }
}

/// Max-norm distance between `a` and `b` after aligning global phase
/// (infimum over phases of `max |a - e^{ip} b|`, realized at the phase of
/// `<b|a>`).
pub fn diff_up_to_phase(a: &CVec, b: &CVec) -> f64 {
    let ip = b.dotc(a);
    let phase = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (0..a.len())
        .map(|i| (a[i] - phase * b[i]).norm())
        .fold(0.0, f64::max)
}
