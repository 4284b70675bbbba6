//! Unitary representations of the supported groups, their characters, and
//! decomposition into irreducible blocks by character projection.
//!
//! Representations are stored per element, either as dense matrices or —
//! for the qubit-sequence representations, which are diagonal in the
//! computational basis — as diagonals only. Construction verifies unitarity
//! and the homomorphism property at [`tol::CONSTRUCTION`].
//!
//! Character tables are generated analytically from the group's structure:
//! cyclic characters are roots of unity, product tables multiply factor
//! characters, and the D3 table is fixed. [`decompose`] projects onto the
//! invariant subspaces with the standard character formula
//! `P_p = (d_p / |G|) * sum_g conj(chi_p(g)) Gamma(g)` and extracts a
//! deterministic orthonormal basis for each block.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{QelimError, Result};
use crate::group::{FiniteGroup, GroupElement, GroupKind};
use crate::linalg::{self, CMat, CVec};
use crate::tol;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Per-element matrices, dense or diagonal-only.
#[derive(Debug, Clone)]
enum RepStorage {
    Dense(Vec<CMat>),
    Diagonal(Vec<CVec>),
}

/// A unitary representation: one d x d unitary per group element,
/// satisfying `Gamma(g) Gamma(h) = Gamma(gh)`.
#[derive(Debug, Clone)]
pub struct UnitaryRepresentation {
    group: Arc<FiniteGroup>,
    dim: usize,
    storage: RepStorage,
}

impl UnitaryRepresentation {
    /// Wraps dense per-element matrices, verifying unitarity and the
    /// homomorphism property over all element pairs.
    pub fn from_dense(group: Arc<FiniteGroup>, matrices: Vec<CMat>) -> Result<Self> {
        if matrices.len() != group.order() || matrices.is_empty() {
            return Err(QelimError::InvalidParameter(
                "one matrix per group element required".into(),
            ));
        }
        let dim = matrices[0].nrows();
        if matrices
            .iter()
            .any(|m| m.nrows() != dim || m.ncols() != dim)
        {
            return Err(QelimError::InvalidParameter(
                "representation matrices must be square of equal size".into(),
            ));
        }
        let rep = UnitaryRepresentation {
            group,
            dim,
            storage: RepStorage::Dense(matrices),
        };
        rep.validate()?;
        Ok(rep)
    }

    /// Wraps per-element diagonals (for representations diagonal in the
    /// computational basis).
    pub fn from_diagonal(group: Arc<FiniteGroup>, diagonals: Vec<CVec>) -> Result<Self> {
        if diagonals.len() != group.order() || diagonals.is_empty() {
            return Err(QelimError::InvalidParameter(
                "one diagonal per group element required".into(),
            ));
        }
        let dim = diagonals[0].len();
        if diagonals.iter().any(|d| d.len() != dim) {
            return Err(QelimError::InvalidParameter(
                "diagonals must have equal length".into(),
            ));
        }
        let rep = UnitaryRepresentation {
            group,
            dim,
            storage: RepStorage::Diagonal(diagonals),
        };
        rep.validate()?;
        Ok(rep)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The matrix of `g`, materialized densely.
    pub fn matrix(&self, g: GroupElement) -> CMat {
        match &self.storage {
            RepStorage::Dense(m) => m[g.0].clone(),
            RepStorage::Diagonal(d) => CMat::from_diagonal(&d[g.0]),
        }
    }

    /// `Gamma(g) v`.
    pub fn apply(&self, g: GroupElement, v: &CVec) -> CVec {
        match &self.storage {
            RepStorage::Dense(m) => &m[g.0] * v,
            RepStorage::Diagonal(d) => d[g.0].component_mul(v),
        }
    }

    /// `Gamma(g)^{-1} v = Gamma(g^{-1}) v`.
    pub fn apply_inverse(&self, g: GroupElement, v: &CVec) -> CVec {
        self.apply(self.group.inverse(g), v)
    }

    /// The character `chi(g) = tr Gamma(g)`.
    pub fn character(&self, g: GroupElement) -> Complex64 {
        match &self.storage {
            RepStorage::Dense(m) => m[g.0].diagonal().sum(),
            RepStorage::Diagonal(d) => d[g.0].sum(),
        }
    }

    /// Largest unitarity residual over all elements,
    /// `max_g max |Gamma(g)† Gamma(g) - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        match &self.storage {
            RepStorage::Dense(mats) => mats
                .iter()
                .map(|m| linalg::identity_residual(&(m.adjoint() * m)))
                .fold(0.0, f64::max),
            RepStorage::Diagonal(diags) => diags
                .iter()
                .flat_map(|d| d.iter())
                .map(|z| (z.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max),
        }
    }

    /// Largest homomorphism residual `max |Gamma(a) Gamma(b) - Gamma(ab)|`.
    /// Checked over all pairs for orders up to 1024; above that the pairs
    /// (a, b) with a among the first 64 elements plus all (a, a^{-1}) are
    /// checked, which already pins every generator relation used here.
    pub fn homomorphism_residual(&self) -> f64 {
        let n = self.group.order();
        let full = n <= 1024;
        let mut worst = 0.0f64;
        let check = |a: usize, b: usize, worst: &mut f64| {
            let ab = self.group.mul(GroupElement(a), GroupElement(b));
            let r = match &self.storage {
                RepStorage::Dense(m) => linalg::max_diff(&(&m[a] * &m[b]), &m[ab.0]),
                RepStorage::Diagonal(d) => {
                    let prod = d[a].component_mul(&d[b]);
                    (0..self.dim)
                        .map(|i| (prod[i] - d[ab.0][i]).norm())
                        .fold(0.0, f64::max)
                }
            };
            *worst = worst.max(r);
        };
        for a in 0..n {
            if full || a < 64 {
                for b in 0..n {
                    check(a, b, &mut worst);
                }
            } else {
                check(a, self.group.inverse(GroupElement(a)).0, &mut worst);
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let u = self.unitarity_residual();
        if u > tol::CONSTRUCTION {
            return Err(QelimError::InvalidParameter(format!(
                "representation not unitary: residual {u:.3e}"
            )));
        }
        let h = self.homomorphism_residual();
        if h > tol::CONSTRUCTION {
            return Err(QelimError::InvalidParameter(format!(
                "homomorphism property fails: residual {h:.3e}"
            )));
        }
        Ok(())
    }

    /// Kronecker product of two representations.
    ///
    /// If `other` shares this representation's group *instance* the result
    /// is a representation of that same group, `g -> A(g) (x) B(g)` (the
    /// D3 two-qubit case). Otherwise the result lives on the direct product
    /// group, `(g, h) -> A(g) (x) B(h)` (the qubit-sequence case). Sharing
    /// is decided by instance identity, not isomorphism: two separately
    /// built Z2 factors deliberately yield Z2 x Z2.
    pub fn tensor(&self, other: &UnitaryRepresentation) -> Result<UnitaryRepresentation> {
        let same = Arc::ptr_eq(&self.group, &other.group);
        if same {
            let group = self.group.clone();
            match (&self.storage, &other.storage) {
                (RepStorage::Diagonal(da), RepStorage::Diagonal(db)) => {
                    let diags = self
                        .group
                        .elements()
                        .map(|g| kron_diag(&da[g.0], &db[g.0]))
                        .collect();
                    UnitaryRepresentation::from_diagonal(group, diags)
                }
                _ => {
                    let mats = self
                        .group
                        .elements()
                        .map(|g| self.matrix(g).kronecker(&other.matrix(g)))
                        .collect();
                    UnitaryRepresentation::from_dense(group, mats)
                }
            }
        } else {
            let product = Arc::new(crate::group::direct_product(&self.group, &other.group)?);
            let nb = other.group.order();
            match (&self.storage, &other.storage) {
                (RepStorage::Diagonal(da), RepStorage::Diagonal(db)) => {
                    let diags = (0..product.order())
                        .map(|x| kron_diag(&da[x / nb], &db[x % nb]))
                        .collect();
                    UnitaryRepresentation::from_diagonal(product, diags)
                }
                _ => {
                    let mats = (0..product.order())
                        .map(|x| {
                            self.matrix(GroupElement(x / nb))
                                .kronecker(&other.matrix(GroupElement(x % nb)))
                        })
                        .collect();
                    UnitaryRepresentation::from_dense(product, mats)
                }
            }
        }
    }
}

fn kron_diag(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// The Z2 qubit representation {I, R} with `R|0> = |0>`, `R|1> = -|1>`.
pub fn rep_reflection_qubit() -> UnitaryRepresentation {
    rep_cyclic_qubit(2).expect("Z2 qubit representation is valid")
}

/// The Z_N qubit representation `Gamma(g^j) = diag(1, exp(2 pi i j / N))`,
/// the direct sum of the trivial irrep (on |0>) and the first nontrivial
/// irrep (on |1>).
pub fn rep_cyclic_qubit(n: usize) -> Result<UnitaryRepresentation> {
    let group = Arc::new(crate::group::build_cyclic(n)?);
    let diags = (0..n)
        .map(|j| {
            let phase =
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
            CVec::from_vec(vec![ONE, phase])
        })
        .collect();
    UnitaryRepresentation::from_diagonal(group, diags)
}

/// The two-dimensional Z3 representation generated by the rotation by
/// 2 pi / 3 in the x-y plane. Its orbit through |0> is the trine.
pub fn rep_rotation_z3() -> UnitaryRepresentation {
    let group = Arc::new(crate::group::build_cyclic(3).expect("Z3"));
    let h = 3f64.sqrt() / 2.0;
    let v = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(-0.5, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(-0.5, 0.0),
        ],
    );
    let mats = vec![linalg::identity(2), v.clone(), &v * &v];
    UnitaryRepresentation::from_dense(group, mats).expect("rotation representation is valid")
}

/// The standard two-dimensional D3 representation: `r` acts as the rotation
/// by 2 pi / 3 and `s` as diag(1, -1), extended to all six elements by the
/// homomorphism property.
pub fn rep_d3_standard() -> UnitaryRepresentation {
    let group = Arc::new(crate::group::build_dihedral3());
    let h = 3f64.sqrt() / 2.0;
    let r = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(-0.5, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-0.5, 0.0),
        ],
    );
    let s = CMat::from_diagonal(&CVec::from_vec(vec![ONE, -ONE]));
    let mut mats = Vec::with_capacity(6);
    for m in 0..2 {
        for k in 0..3 {
            let mut mat = linalg::identity(2);
            for _ in 0..k {
                mat = &r * mat;
            }
            if m == 1 {
                mat *= &s;
            }
            mats.push(mat);
        }
    }
    UnitaryRepresentation::from_dense(group, mats).expect("D3 standard representation is valid")
}

// ---------------------------------------------------------------------------
// Character tables
// ---------------------------------------------------------------------------

/// One irreducible representation's row of a character table.
#[derive(Debug, Clone)]
pub struct IrrepRow {
    pub label: String,
    pub dim: usize,
    /// Character value per conjugacy class, in class order.
    pub chars: Vec<Complex64>,
}

/// The complete character table of a supported group.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    group: Arc<FiniteGroup>,
    classes: Vec<Vec<GroupElement>>,
    class_of: Vec<usize>,
    rows: Vec<IrrepRow>,
}

impl CharacterTable {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn classes(&self) -> &[Vec<GroupElement>] {
        &self.classes
    }

    pub fn rows(&self) -> &[IrrepRow] {
        &self.rows
    }

    /// Character of irrep `row` at a group element.
    pub fn character(&self, row: usize, g: GroupElement) -> Complex64 {
        self.rows[row].chars[self.class_of[g.0]]
    }

    /// Largest deviation from row orthogonality,
    /// `max |(1/|G|) sum_c |C_c| chi_p(c) conj(chi_q(c)) - delta_pq|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.group.order() as f64;
        let mut worst = 0.0f64;
        for p in 0..self.rows.len() {
            for q in p..self.rows.len() {
                let mut acc = ZERO;
                for (c, class) in self.classes.iter().enumerate() {
                    acc += Complex64::new(class.len() as f64 / n, 0.0)
                        * self.rows[p].chars[c]
                        * self.rows[q].chars[c].conj();
                }
                let target = if p == q { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

/// Number of irreps and their dimensions/labels for a group kind.
fn irrep_dims(kind: &GroupKind) -> Vec<(String, usize)> {
    match kind {
        GroupKind::Cyclic(n) => (0..*n).map(|k| (format!("G{k}"), 1)).collect(),
        GroupKind::Dihedral3 => vec![("G1".into(), 1), ("G2".into(), 1), ("G3".into(), 2)],
        GroupKind::Product(a, b) => {
            let (ia, ib) = (irrep_dims(a), irrep_dims(b));
            let mut out = Vec::with_capacity(ia.len() * ib.len());
            for (la, da) in &ia {
                for (lb, db) in &ib {
                    let strip = |l: &str, k: &GroupKind| {
                        if matches!(k, GroupKind::Product(_, _)) {
                            l[1..l.len() - 1].to_string()
                        } else {
                            l.to_string()
                        }
                    };
                    out.push((format!("({},{})", strip(la, a), strip(lb, b)), da * db));
                }
            }
            out
        }
    }
}

/// Analytic character of irrep `row` at element `el` for a group kind.
fn irrep_char(kind: &GroupKind, row: usize, el: usize) -> Complex64 {
    match kind {
        GroupKind::Cyclic(n) => Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * (row * el % n) as f64 / *n as f64,
        ),
        GroupKind::Dihedral3 => match (row, el) {
            (0, _) => ONE,
            (1, e) if e < 3 => ONE,
            (1, _) => -ONE,
            (2, 0) => Complex64::new(2.0, 0.0),
            (2, e) if e < 3 => -ONE,
            (2, _) => ZERO,
            _ => unreachable!("D3 has three irreps"),
        },
        GroupKind::Product(a, b) => {
            let (nb_irreps, nb_elems) = (irrep_dims(b).len(), b.order());
            irrep_char(a, row / nb_irreps, el / nb_elems)
                * irrep_char(b, row % nb_irreps, el % nb_elems)
        }
    }
}

/// The complete character table, generated analytically from the group's
/// structure (cyclic characters are roots of unity, product characters
/// multiply, D3 is fixed). Orthogonality is verified pairwise for orders
/// up to 64 and row-normwise above that; the full pairwise check is
/// available through [`CharacterTable::orthogonality_residual`].
pub fn character_table(group: &Arc<FiniteGroup>) -> Result<CharacterTable> {
    let kind = group.kind().clone();
    if kind.order() != group.order() {
        return Err(QelimError::UnsupportedGroup(
            "group structure does not match its order".into(),
        ));
    }
    let classes = group.conjugacy_classes();
    let mut class_of = vec![0usize; group.order()];
    for (c, class) in classes.iter().enumerate() {
        for g in class {
            class_of[g.0] = c;
        }
    }
    let dims = irrep_dims(&kind);
    if dims.iter().map(|(_, d)| d * d).sum::<usize>() != group.order() {
        return Err(QelimError::UnsupportedGroup(
            "irrep dimensions do not square-sum to |G|".into(),
        ));
    }
    let mut rows = Vec::with_capacity(dims.len());
    for (row, (label, dim)) in dims.into_iter().enumerate() {
        let chars: Vec<Complex64> = classes
            .iter()
            .map(|class| {
                let rep = irrep_char(&kind, row, class[0].0);
                // Characters are class functions; verify on the rest.
                for g in &class[1..] {
                    debug_assert!((irrep_char(&kind, row, g.0) - rep).norm() < tol::CONSTRUCTION);
                }
                rep
            })
            .collect();
        if (chars[class_of[group.identity().0]].re - dim as f64).abs() > tol::CONSTRUCTION {
            return Err(QelimError::UnsupportedGroup(
                "character at identity must equal the irrep dimension".into(),
            ));
        }
        rows.push(IrrepRow { label, dim, chars });
    }
    let table = CharacterTable {
        group: group.clone(),
        classes,
        class_of,
        rows,
    };
    let residual = if group.order() <= 64 {
        table.orthogonality_residual()
    } else {
        table_norm_residual(&table)
    };
    if residual > tol::CONSTRUCTION {
        return Err(QelimError::NumericalFailure(format!(
            "character table orthogonality residual {residual:.3e}"
        )));
    }
    Ok(table)
}

/// Diagonal-only orthogonality check (each row has unit norm).
fn table_norm_residual(table: &CharacterTable) -> f64 {
    let n = table.group.order() as f64;
    let mut worst = 0.0f64;
    for row in &table.rows {
        let mut acc = 0.0;
        for (c, class) in table.classes.iter().enumerate() {
            acc += class.len() as f64 / n * row.chars[c].norm_sqr();
        }
        worst = worst.max((acc - 1.0).abs());
    }
    worst
}

// ---------------------------------------------------------------------------
// Irrep decomposition
// ---------------------------------------------------------------------------

/// One irreducible block of a decomposition: the irrep's label and
/// dimension, its multiplicity in the representation, and an orthonormal
/// basis of the invariant subspace.
#[derive(Debug, Clone)]
pub struct IrrepBlock {
    pub label: String,
    pub dim: usize,
    pub multiplicity: usize,
    pub basis: Vec<CVec>,
}

/// Decomposition of a representation into irreducible blocks with
/// multiplicity at most one each.
///
/// The per-block bases are deterministic: each subspace is spanned by
/// Gram-Schmidt over the projections of the computational basis vectors
/// (taken in index order), with each basis vector's global phase fixed so
/// its largest-magnitude component is real positive.
#[derive(Debug, Clone)]
pub struct IrrepDecomposition {
    dim: usize,
    group_order: usize,
    blocks: Vec<IrrepBlock>,
}

impl IrrepDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn blocks(&self) -> &[IrrepBlock] {
        &self.blocks
    }

    /// The projector onto block `idx`, `P_p = sum_b |b><b|`.
    pub fn projector(&self, idx: usize) -> CMat {
        let mut p = CMat::zeros(self.dim, self.dim);
        for b in &self.blocks[idx].basis {
            linalg::add_outer(&mut p, b);
        }
        p
    }

    /// All block basis vectors flattened, in block order.
    pub fn basis_vectors(&self) -> impl Iterator<Item = &CVec> {
        self.blocks.iter().flat_map(|b| b.basis.iter())
    }

    pub fn total_basis_len(&self) -> usize {
        self.blocks.iter().map(|b| b.basis.len()).sum()
    }

    /// Squared norms of the projections of `v` onto each block,
    /// `||P_p v||^2` in block order.
    pub fn component_norms(&self, v: &CVec) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.basis.iter().map(|x| x.dotc(v).norm_sqr()).sum())
            .collect()
    }

    /// Per-block target squared norms `d_p / |G|` of the covariant seed
    /// condition.
    pub fn seed_norm_targets(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| (b.dim * b.multiplicity) as f64 / self.group_order as f64)
            .collect()
    }
}

/// Decomposes `rep` into irreducible blocks via character projection.
///
/// Fails with [`QelimError::MultiplicityViolation`] if any irrep appears
/// more than once (the covariant construction assumes multiplicity <= 1).
pub fn decompose(
    rep: &UnitaryRepresentation,
    table: &CharacterTable,
) -> Result<IrrepDecomposition> {
    if **table.group() != **rep.group() {
        return Err(QelimError::InvalidParameter(
            "character table is for a different group".into(),
        ));
    }
    let n = rep.group().order();
    let d = rep.dim();
    let rep_chars: Vec<Complex64> = rep.group().elements().map(|g| rep.character(g)).collect();

    let mut blocks = Vec::new();
    let mut claimed = vec![false; d]; // diagonal path bookkeeping
    for (row_idx, row) in table.rows().iter().enumerate() {
        let mut m = ZERO;
        for g in rep.group().elements() {
            m += rep_chars[g.0] * table.character(row_idx, g).conj();
        }
        m /= Complex64::new(n as f64, 0.0);
        if m.im.abs() > tol::RANK_EIG || m.re < -tol::RANK_EIG {
            return Err(QelimError::NumericalFailure(format!(
                "multiplicity of {} is not a nonnegative real: {m}",
                row.label
            )));
        }
        let mult = m.re.round();
        if (m.re - mult).abs() > tol::RANK_EIG {
            return Err(QelimError::NumericalFailure(format!(
                "multiplicity of {} is not an integer: {}",
                row.label, m.re
            )));
        }
        let mult = mult as usize;
        if mult == 0 {
            continue;
        }
        if mult > 1 {
            return Err(QelimError::MultiplicityViolation(format!(
                "irrep {} appears {} times",
                row.label, mult
            )));
        }
        let basis = match &rep.storage {
            RepStorage::Diagonal(diags) => {
                diagonal_block_basis(rep, diags, table, row_idx, row.dim, &mut claimed)?
            }
            RepStorage::Dense(_) => dense_block_basis(rep, table, row_idx, row.dim)?,
        };
        blocks.push(IrrepBlock {
            label: row.label.clone(),
            dim: row.dim,
            multiplicity: 1,
            basis,
        });
    }

    let decomp = IrrepDecomposition {
        dim: d,
        group_order: n,
        blocks,
    };
    if decomp.total_basis_len() != d {
        return Err(QelimError::NumericalFailure(format!(
            "invariant-subspace bases span {} of {} dimensions",
            decomp.total_basis_len(),
            d
        )));
    }
    verify_decomposition(rep, &decomp)?;
    Ok(decomp)
}

/// Basis of one block for a diagonal representation: the projector is
/// diagonal with entries clamped to {0, 1}, so the basis is the set of
/// computational vectors its unit entries select.
fn diagonal_block_basis(
    rep: &UnitaryRepresentation,
    diags: &[CVec],
    table: &CharacterTable,
    row_idx: usize,
    irrep_dim: usize,
    claimed: &mut [bool],
) -> Result<Vec<CVec>> {
    let n = rep.group().order() as f64;
    let scale = irrep_dim as f64 / n;
    let mut basis = Vec::new();
    for i in 0..rep.dim() {
        let mut entry = ZERO;
        for g in rep.group().elements() {
            entry += table.character(row_idx, g).conj() * diags[g.0][i];
        }
        entry *= Complex64::new(scale, 0.0);
        if (entry - ONE).norm() <= tol::RANK_EIG {
            if claimed[i] {
                return Err(QelimError::NumericalFailure(format!(
                    "basis vector {i} claimed by two irreps"
                )));
            }
            claimed[i] = true;
            let mut e = CVec::zeros(rep.dim());
            e[i] = ONE;
            basis.push(e);
        } else if entry.norm() > tol::RANK_EIG {
            return Err(QelimError::NumericalFailure(format!(
                "diagonal projector entry {entry} is not 0 or 1"
            )));
        }
    }
    if basis.len() != irrep_dim {
        return Err(QelimError::NumericalFailure(format!(
            "block dimension {} does not match irrep dimension {}",
            basis.len(),
            irrep_dim
        )));
    }
    Ok(basis)
}

/// Basis of one block for a dense representation: project the
/// computational basis through `P_p` and orthonormalize in index order.
fn dense_block_basis(
    rep: &UnitaryRepresentation,
    table: &CharacterTable,
    row_idx: usize,
    irrep_dim: usize,
) -> Result<Vec<CVec>> {
    let n = rep.group().order() as f64;
    let scale = Complex64::new(irrep_dim as f64 / n, 0.0);
    let mut p = CMat::zeros(rep.dim(), rep.dim());
    for g in rep.group().elements() {
        p += rep.matrix(g) * (table.character(row_idx, g).conj() * scale);
    }
    let mut basis: Vec<CVec> = Vec::with_capacity(irrep_dim);
    for j in 0..rep.dim() {
        if basis.len() == irrep_dim {
            break;
        }
        let mut w = p.column(j).into_owned();
        // Two orthogonalization passes keep the basis orthonormal to
        // machine precision.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let norm = w.norm();
        if norm < 1e-6 {
            continue;
        }
        w /= Complex64::new(norm, 0.0);
        linalg::phase_fix(&mut w);
        basis.push(w);
    }
    if basis.len() != irrep_dim {
        return Err(QelimError::NumericalFailure(format!(
            "found {} basis vectors for an irrep of dimension {}",
            basis.len(),
            irrep_dim
        )));
    }
    Ok(basis)
}

/// Completeness, orthogonality, idempotence, and commutation checks at
/// [`tol::DERIVED`]. Dense projectors are checked explicitly; diagonal
/// decompositions were already reduced to exact 0/1 index sets, so only
/// completeness of the index cover remains (verified by the caller).
fn verify_decomposition(rep: &UnitaryRepresentation, decomp: &IrrepDecomposition) -> Result<()> {
    if matches!(rep.storage, RepStorage::Diagonal(_)) {
        return Ok(());
    }
    let d = rep.dim();
    let projectors: Vec<CMat> = (0..decomp.blocks.len())
        .map(|i| decomp.projector(i))
        .collect();
    let mut sum = CMat::zeros(d, d);
    for p in &projectors {
        sum += p;
    }
    let completeness = linalg::identity_residual(&sum);
    if completeness > tol::DERIVED {
        return Err(QelimError::NumericalFailure(format!(
            "projector completeness residual {completeness:.3e}"
        )));
    }
    for (i, pi) in projectors.iter().enumerate() {
        for (j, pj) in projectors.iter().enumerate() {
            let prod = pi * pj;
            let target = if i == j {
                pi.clone()
            } else {
                CMat::zeros(d, d)
            };
            let r = linalg::max_diff(&prod, &target);
            if r > tol::DERIVED {
                return Err(QelimError::NumericalFailure(format!(
                    "projector orthogonality residual {r:.3e}"
                )));
            }
        }
    }
    for g in rep.group().elements() {
        let m = rep.matrix(g);
        for p in &projectors {
            let r = linalg::max_diff(&(p * &m), &(&m * p));
            if r > tol::DERIVED {
                return Err(QelimError::NumericalFailure(format!(
                    "projector does not commute with the representation: residual {r:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// The group average `(1/|G|) sum_g Gamma(g) |x><x| Gamma(g)^{-1}`.
///
/// By the decomposition theorem this equals
/// `sum_p (||x_p||^2 / d_p) P_p`; the direct sum here serves as the
/// independent route when testing that identity.
pub fn group_average(rep: &UnitaryRepresentation, x: &CVec) -> CMat {
    let d = rep.dim();
    let mut acc = CMat::zeros(d, d);
    for g in rep.group().elements() {
        let gx = rep.apply(g, x);
        linalg::add_outer(&mut acc, &gx);
    }
    acc / Complex64::new(rep.group().order() as f64, 0.0)
}
