//! Finite group algebra: cyclic groups, direct products, and the dihedral
//! group D3, with subgroup and coset machinery.
//!
//! Groups are stored as dense multiplication tables over element indices,
//! which keeps every group operation O(1). Orders up to [`MAX_ORDER`] are
//! accepted; the group axioms are checked exhaustively at construction
//! (associativity only for orders <= [`ASSOC_CHECK_MAX`], since that check
//! is cubic in the order). All types are immutable after construction.

use std::sync::Arc;

use crate::error::{QelimError, Result};

/// Largest group order the dense-table representation accepts.
pub const MAX_ORDER: usize = 65_536;

/// Largest order for which associativity is verified over all triples.
pub const ASSOC_CHECK_MAX: usize = 64;

/// Index of an element within its owning [`FiniteGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub usize);

/// How a group was built. Character tables are generated analytically from
/// this structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Dihedral3,
    Product(Box<GroupKind>, Box<GroupKind>),
}

impl GroupKind {
    pub fn order(&self) -> usize {
        match self {
            GroupKind::Cyclic(n) => *n,
            GroupKind::Dihedral3 => 6,
            GroupKind::Product(a, b) => a.order() * b.order(),
        }
    }
}

/// A finite group with dense multiplication and inverse tables.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    identity: usize,
    mult: Vec<usize>,
    inverse: Vec<usize>,
    labels: Vec<String>,
    kind: GroupKind,
}

impl PartialEq for FiniteGroup {
    /// Structural equality: same order, identity, and multiplication table.
    /// Labels and construction history do not affect the group.
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.identity == other.identity && self.mult == other.mult
    }
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(self.identity)
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order).map(GroupElement)
    }

    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(self.mult[a.0 * self.order + b.0])
    }

    pub fn inverse(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.inverse[a.0])
    }

    pub fn label(&self, a: GroupElement) -> &str {
        &self.labels[a.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Conjugacy classes, each sorted, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<GroupElement>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = self
                .elements()
                .map(|g| self.mul(self.mul(g, GroupElement(x)), self.inverse(g)).0)
                .collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class.into_iter().map(GroupElement).collect());
        }
        classes
    }

    fn validate(&self) -> Result<()> {
        let n = self.order;
        if n == 0 {
            return Err(QelimError::InvalidParameter(
                "group order must be positive".into(),
            ));
        }
        if n > MAX_ORDER {
            return Err(QelimError::InvalidParameter(format!(
                "group order {n} exceeds the dense-table limit {MAX_ORDER}"
            )));
        }
        if self.mult.len() != n * n || self.inverse.len() != n || self.labels.len() != n {
            return Err(QelimError::InvalidParameter(
                "group table shape mismatch".into(),
            ));
        }
        for &v in &self.mult {
            if v >= n {
                return Err(QelimError::InvalidParameter(
                    "multiplication table entry out of range".into(),
                ));
            }
        }
        let e = self.identity;
        for x in 0..n {
            if self.mult[e * n + x] != x || self.mult[x * n + e] != x {
                return Err(QelimError::InvalidParameter("identity axiom fails".into()));
            }
            let inv = self.inverse[x];
            if self.mult[x * n + inv] != e || self.mult[inv * n + x] != e {
                return Err(QelimError::InvalidParameter("inverse axiom fails".into()));
            }
        }
        if n <= ASSOC_CHECK_MAX {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mult[a * n + b];
                    for c in 0..n {
                        let bc = self.mult[b * n + c];
                        if self.mult[ab * n + c] != self.mult[a * n + bc] {
                            return Err(QelimError::InvalidParameter("associativity fails".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The cyclic group Z_N with `mult(j, k) = (j + k) mod N` and identity 0.
pub fn build_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(QelimError::InvalidParameter(
            "cyclic group order must be >= 1".into(),
        ));
    }
    if n > MAX_ORDER {
        return Err(QelimError::InvalidParameter(format!(
            "cyclic group order {n} exceeds the dense-table limit {MAX_ORDER}"
        )));
    }
    let mut mult = vec![0usize; n * n];
    for j in 0..n {
        for k in 0..n {
            mult[j * n + k] = (j + k) % n;
        }
    }
    let inverse = (0..n).map(|j| (n - j) % n).collect();
    let labels = (0..n)
        .map(|j| match j {
            0 => "e".to_string(),
            1 => "g".to_string(),
            _ => format!("g^{j}"),
        })
        .collect();
    let g = FiniteGroup {
        order: n,
        identity: 0,
        mult,
        inverse,
        labels,
        kind: GroupKind::Cyclic(n),
    };
    g.validate()?;
    Ok(g)
}

/// Strips the outer parentheses of a product-element label so nested
/// products read as flat tuples, e.g. `((e,g),g)` becomes `(e,g,g)`.
fn tuple_inner(group: &FiniteGroup, idx: usize) -> String {
    let label = &group.labels[idx];
    if matches!(group.kind, GroupKind::Product(_, _)) {
        label[1..label.len() - 1].to_string()
    } else {
        label.clone()
    }
}

/// Direct product with componentwise multiplication. The element `(a, b)`
/// gets index `a * |B| + b`; labels are comma-joined tuples.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let (na, nb) = (a.order, b.order);
    let n = na
        .checked_mul(nb)
        .filter(|&n| n <= MAX_ORDER)
        .ok_or_else(|| {
            QelimError::InvalidParameter(format!(
                "product order {na}*{nb} exceeds the dense-table limit {MAX_ORDER}"
            ))
        })?;
    let mut mult = vec![0usize; n * n];
    for ia in 0..na {
        for ib in 0..nb {
            let x = ia * nb + ib;
            for ja in 0..na {
                for jb in 0..nb {
                    let y = ja * nb + jb;
                    mult[x * n + y] = a.mult[ia * na + ja] * nb + b.mult[ib * nb + jb];
                }
            }
        }
    }
    let inverse = (0..n)
        .map(|x| a.inverse[x / nb] * nb + b.inverse[x % nb])
        .collect();
    let labels = (0..n)
        .map(|x| format!("({},{})", tuple_inner(a, x / nb), tuple_inner(b, x % nb)))
        .collect();
    let g = FiniteGroup {
        order: n,
        identity: a.identity * nb + b.identity,
        mult,
        inverse,
        labels,
        kind: GroupKind::Product(Box::new(a.kind.clone()), Box::new(b.kind.clone())),
    };
    g.validate()?;
    Ok(g)
}

/// The dihedral group D3 = {e, r, r2, s, rs, r2s} with r^3 = e, s^2 = e,
/// and s r = r^2 s. Element r^k s^m gets index k + 3m.
pub fn build_dihedral3() -> FiniteGroup {
    let n = 6;
    let idx = |k: usize, m: usize| k + 3 * m;
    let mut mult = vec![0usize; n * n];
    let mut inverse = vec![0usize; n];
    for k in 0..3 {
        for m in 0..2 {
            let x = idx(k, m);
            for k2 in 0..3 {
                for m2 in 0..2 {
                    // r^k s^m r^k2 s^m2 = r^(k +/- k2) s^(m+m2)
                    let kk = if m == 0 {
                        (k + k2) % 3
                    } else {
                        (k + 3 - k2) % 3
                    };
                    mult[x * n + idx(k2, m2)] = idx(kk, (m + m2) % 2);
                }
            }
            inverse[x] = if m == 0 { idx((3 - k) % 3, 0) } else { x };
        }
    }
    let labels = ["e", "r", "r2", "s", "rs", "r2s"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let g = FiniteGroup {
        order: n,
        identity: 0,
        mult,
        inverse,
        labels,
        kind: GroupKind::Dihedral3,
    };
    g.validate().expect("D3 table is correct by construction");
    g
}

/// Builds the group described by `kind` (used to regenerate product factors
/// when composing character tables).
pub fn build_from_kind(kind: &GroupKind) -> Result<FiniteGroup> {
    match kind {
        GroupKind::Cyclic(n) => build_cyclic(*n),
        GroupKind::Dihedral3 => Ok(build_dihedral3()),
        GroupKind::Product(a, b) => direct_product(&build_from_kind(a)?, &build_from_kind(b)?),
    }
}

/// True iff `members` contains the identity and is closed under products
/// and inverses.
pub fn is_subgroup(group: &FiniteGroup, members: &[GroupElement]) -> bool {
    let set: std::collections::BTreeSet<usize> = members.iter().map(|g| g.0).collect();
    if members.iter().any(|g| g.0 >= group.order) {
        return false;
    }
    if !set.contains(&group.identity) {
        return false;
    }
    for &a in &set {
        if !set.contains(&group.inverse[a]) {
            return false;
        }
        for &b in &set {
            if !set.contains(&group.mult[a * group.order + b]) {
                return false;
            }
        }
    }
    true
}

/// A verified subgroup: contains the identity, closed under multiplication
/// and inverse. Members are kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<GroupElement>,
}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, members: &[GroupElement]) -> Result<Self> {
        let mut members: Vec<GroupElement> = members.to_vec();
        members.sort_unstable();
        members.dedup();
        if !is_subgroup(&parent, &members) {
            return Err(QelimError::InvalidSubgroup(format!(
                "set {{{}}} is not a subgroup",
                members
                    .iter()
                    .map(|g| parent.label(*g))
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(Subgroup { parent, members })
    }

    /// The trivial subgroup {e}.
    pub fn trivial(parent: Arc<FiniteGroup>) -> Self {
        let members = vec![parent.identity()];
        Subgroup { parent, members }
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[GroupElement] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }
}

/// The left cosets gH of a subgroup: pairwise disjoint, covering the group.
#[derive(Debug, Clone, PartialEq)]
pub struct CosetPartition {
    cosets: Vec<Vec<GroupElement>>,
    representatives: Vec<GroupElement>,
}

impl CosetPartition {
    pub fn cosets(&self) -> &[Vec<GroupElement>] {
        &self.cosets
    }

    pub fn representatives(&self) -> &[GroupElement] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }
}

/// Left cosets of `h` in `group`, sorted by smallest member so the coset
/// containing the identity comes first. The representative of each coset is
/// its smallest member.
pub fn left_cosets(group: &FiniteGroup, h: &Subgroup) -> Result<CosetPartition> {
    if **h.parent() != *group {
        return Err(QelimError::InvalidSubgroup(
            "subgroup belongs to a different group".into(),
        ));
    }
    let mut assigned = vec![false; group.order()];
    let mut cosets = Vec::new();
    for g in group.elements() {
        if assigned[g.0] {
            continue;
        }
        let mut coset: Vec<GroupElement> = h.members().iter().map(|&m| group.mul(g, m)).collect();
        coset.sort_unstable();
        coset.dedup();
        if coset.len() != h.order() {
            return Err(QelimError::InvalidSubgroup(
                "coset size differs from |H|".into(),
            ));
        }
        for &m in &coset {
            if assigned[m.0] {
                return Err(QelimError::InvalidPartition("cosets overlap".into()));
            }
            assigned[m.0] = true;
        }
        cosets.push(coset);
    }
    // Scanning elements in index order already yields cosets sorted by
    // smallest member.
    let representatives = cosets.iter().map(|c| c[0]).collect();
    Ok(CosetPartition {
        cosets,
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_examples() {
        let z1 = build_cyclic(1).unwrap();
        assert_eq!(z1.order(), 1);
        assert_eq!(z1.mul(GroupElement(0), GroupElement(0)), GroupElement(0));

        let z2 = build_cyclic(2).unwrap();
        assert_eq!(z2.mul(GroupElement(1), GroupElement(1)), z2.identity());

        let z3 = build_cyclic(3).unwrap();
        assert_eq!(z3.mul(GroupElement(1), GroupElement(2)), z3.identity());
        assert_eq!(z3.label(GroupElement(2)), "g^2");
    }

    #[test]
    fn cyclic_rejects_order_zero() {
        assert!(matches!(
            build_cyclic(0),
            Err(QelimError::InvalidParameter(_))
        ));
    }

    #[test]
    fn product_z2_z2() {
        let z2 = build_cyclic(2).unwrap();
        let g = direct_product(&z2, &z2).unwrap();
        assert_eq!(g.order(), 4);
        for x in g.elements() {
            assert_eq!(g.mul(x, x), g.identity(), "every element self-inverse");
        }
        assert_eq!(g.label(GroupElement(2)), "(g,e)");
    }

    #[test]
    fn product_with_trivial_group_is_isomorphic_copy() {
        let z1 = build_cyclic(1).unwrap();
        let z3 = build_cyclic(3).unwrap();
        let g = direct_product(&z1, &z3).unwrap();
        assert_eq!(g.order(), 3);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(g.mul(GroupElement(a), GroupElement(b)).0, (a + b) % 3);
            }
        }
    }

    #[test]
    fn iterated_product_has_exponent_two() {
        let z2 = build_cyclic(2).unwrap();
        let g4 = direct_product(&z2, &z2).unwrap();
        let g8 = direct_product(&g4, &z2).unwrap();
        assert_eq!(g8.order(), 8);
        for x in g8.elements() {
            assert_eq!(g8.mul(x, x), g8.identity());
        }
        assert_eq!(g8.label(GroupElement(7)), "(g,g,g)");
    }

    #[test]
    fn product_is_associative_up_to_relabeling() {
        let z2 = build_cyclic(2).unwrap();
        let z3 = build_cyclic(3).unwrap();
        let z4 = build_cyclic(4).unwrap();
        let left = direct_product(&direct_product(&z2, &z3).unwrap(), &z4).unwrap();
        let right = direct_product(&z2, &direct_product(&z3, &z4).unwrap()).unwrap();
        // (a,(b,c)) and ((a,b),c) index identically under mixed radix.
        assert_eq!(left.mult, right.mult);
        assert_eq!(left.identity, right.identity);
    }

    #[test]
    fn dihedral3_relations_and_classes() {
        let d3 = build_dihedral3();
        let (r, r2, s) = (GroupElement(1), GroupElement(2), GroupElement(3));
        assert_eq!(d3.mul(r, r2), d3.identity());
        assert_eq!(d3.mul(s, s), d3.identity());
        // s r = r^2 s
        assert_eq!(d3.mul(s, r), GroupElement(5));
        let classes = d3.conjugacy_classes();
        assert_eq!(
            classes,
            vec![
                vec![GroupElement(0)],
                vec![GroupElement(1), GroupElement(2)],
                vec![GroupElement(3), GroupElement(4), GroupElement(5)],
            ]
        );
    }

    #[test]
    fn subgroup_detection() {
        let z2 = build_cyclic(2).unwrap();
        let g8 = direct_product(&direct_product(&z2, &z2).unwrap(), &z2).unwrap();
        assert!(is_subgroup(&g8, &[GroupElement(0)]));
        // {(e,e,e), (g,g,g)}
        assert!(is_subgroup(&g8, &[GroupElement(0), GroupElement(7)]));
        assert!(!is_subgroup(&g8, &[GroupElement(7)]), "missing identity");
        assert!(!is_subgroup(
            &g8,
            &[GroupElement(0), GroupElement(1), GroupElement(2)]
        ));
    }

    #[test]
    fn cosets_of_diagonal_subgroup_in_z2xz2() {
        let z2 = build_cyclic(2).unwrap();
        let g = Arc::new(direct_product(&z2, &z2).unwrap());
        let h = Subgroup::new(g.clone(), &[GroupElement(0), GroupElement(3)]).unwrap();
        let p = left_cosets(&g, &h).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.cosets()[0], vec![GroupElement(0), GroupElement(3)]);
        assert_eq!(p.cosets()[1], vec![GroupElement(1), GroupElement(2)]);
    }

    #[test]
    fn cosets_of_four_element_subgroup_in_z2_pow4() {
        let z2 = build_cyclic(2).unwrap();
        let mut g = z2.clone();
        for _ in 0..3 {
            g = direct_product(&g, &z2).unwrap();
        }
        let g = Arc::new(g);
        // {0000, 0011, 1100, 1111} as bit patterns
        let members = [0usize, 3, 12, 15].map(GroupElement);
        let h = Subgroup::new(g.clone(), &members).unwrap();
        let p = left_cosets(&g, &h).unwrap();
        assert_eq!(p.len(), 4);
        for c in p.cosets() {
            assert_eq!(c.len(), 4);
        }
    }

    #[test]
    fn trivial_subgroup_gives_singleton_cosets() {
        let z3 = Arc::new(build_cyclic(3).unwrap());
        let h = Subgroup::trivial(z3.clone());
        let p = left_cosets(&z3, &h).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.cosets().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn subgroup_constructor_rejects_non_closed_set() {
        let z4 = Arc::new(build_cyclic(4).unwrap());
        let err = Subgroup::new(z4, &[GroupElement(0), GroupElement(1)]);
        assert!(matches!(err, Err(QelimError::InvalidSubgroup(_))));
    }
}
