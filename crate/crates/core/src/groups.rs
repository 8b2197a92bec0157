//! The five families of finite subgroups of SU(2), their conjugacy classes,
//! and the projection to SO(3).
//!
//! Binary polyhedral groups are built from exact quaternions. Cyclic and
//! binary dihedral groups of arbitrary order use their presentations, since
//! their roots of unity do not live in ℚ(√2, √5).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::{FieldElement, Quaternion};

pub const DEFAULT_N_BOUND: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "family", content = "n", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic(u32),
    BinaryDihedral(u32),
    BinaryTetrahedral,
    BinaryOctahedral,
    BinaryIcosahedral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cyclic,
    Dihedral,
    Polyhedral,
}

impl GroupSpec {
    pub fn validate(self, n_bound: u32) -> Result<Self> {
        match self {
            GroupSpec::Cyclic(n) | GroupSpec::BinaryDihedral(n) if n < 2 || n > n_bound => Err(
                Error::InvalidArgument(format!("n = {n} outside 2..={n_bound}")),
            ),
            s => Ok(s),
        }
    }

    pub fn family(self) -> Family {
        match self {
            GroupSpec::Cyclic(_) => Family::Cyclic,
            GroupSpec::BinaryDihedral(_) => Family::Dihedral,
            _ => Family::Polyhedral,
        }
    }

    pub fn order(self) -> usize {
        match self {
            GroupSpec::Cyclic(n) => n as usize,
            GroupSpec::BinaryDihedral(n) => 4 * n as usize,
            GroupSpec::BinaryTetrahedral => 24,
            GroupSpec::BinaryOctahedral => 48,
            GroupSpec::BinaryIcosahedral => 120,
        }
    }

    /// Number of conjugacy classes, from the classification.
    pub fn class_count(self) -> usize {
        match self {
            GroupSpec::Cyclic(n) => n as usize,
            GroupSpec::BinaryDihedral(n) => n as usize + 3,
            GroupSpec::BinaryTetrahedral => 7,
            GroupSpec::BinaryOctahedral => 8,
            GroupSpec::BinaryIcosahedral => 9,
        }
    }

    /// Letter used in polyhedral class labels.
    pub fn polyhedral_letter(self) -> Option<char> {
        match self {
            GroupSpec::BinaryTetrahedral => Some('T'),
            GroupSpec::BinaryOctahedral => Some('O'),
            GroupSpec::BinaryIcosahedral => Some('I'),
            _ => None,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::BinaryDihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::BinaryTetrahedral => write!(f, "tetrahedral"),
            GroupSpec::BinaryOctahedral => write!(f, "octahedral"),
            GroupSpec::BinaryIcosahedral => write!(f, "icosahedral"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognised group '{s}'"));
        let spec = match s.trim().to_ascii_lowercase().as_str() {
            "tetrahedral" | "binary_tetrahedral" => GroupSpec::BinaryTetrahedral,
            "octahedral" | "binary_octahedral" => GroupSpec::BinaryOctahedral,
            "icosahedral" | "binary_icosahedral" => GroupSpec::BinaryIcosahedral,
            other => {
                let (fam, n) = other.split_once(':').ok_or_else(bad)?;
                let n: u32 = n.parse().map_err(|_| bad())?;
                match fam {
                    "cyclic" => GroupSpec::Cyclic(n),
                    "dihedral" | "binary_dihedral" => GroupSpec::BinaryDihedral(n),
                    _ => return Err(bad()),
                }
            }
        };
        spec.validate(DEFAULT_N_BOUND)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupElement {
    Exact(Quaternion),
    /// `A^k B^l` in the binary dihedral group of order 4n.
    Dihedral { k: u32, l: u32, n: u32 },
    /// `g^k` with `g = Diag(e^{2πi/n}, e^{−2πi/n})`.
    Cyclic { k: u32, n: u32 },
}

impl GroupElement {
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Exact(p), GroupElement::Exact(q)) => GroupElement::Exact(p * q),
            (GroupElement::Cyclic { k, n }, GroupElement::Cyclic { k: k2, n: n2 }) => {
                assert_eq!(n, n2, "mixed cyclic orders");
                GroupElement::Cyclic { k: (k + k2) % n, n: *n }
            }
            (
                GroupElement::Dihedral { k, l, n },
                GroupElement::Dihedral { k: m, l: p, n: n2 },
            ) => {
                assert_eq!(n, n2, "mixed dihedral orders");
                let two_n = 2 * n;
                match (l, p) {
                    (0, _) => GroupElement::Dihedral { k: (k + m) % two_n, l: *p, n: *n },
                    // A^k B A^m = A^{k−m} B and B² = Aⁿ.
                    (_, 0) => GroupElement::Dihedral { k: (k + two_n - m) % two_n, l: 1, n: *n },
                    _ => GroupElement::Dihedral { k: (k + two_n - m + n) % two_n, l: 0, n: *n },
                }
            }
            _ => panic!("elements from different presentations"),
        }
    }

    /// `(α, β)` of the SU(2) matrix `[[α, −β̄], [β, ᾱ]]`.
    pub fn su2(&self) -> (Complex64, Complex64) {
        match self {
            GroupElement::Exact(q) => q.to_su2(),
            GroupElement::Cyclic { k, n } => {
                (Complex64::from_polar(1.0, 2.0 * PI * *k as f64 / *n as f64), Complex64::new(0.0, 0.0))
            }
            GroupElement::Dihedral { k, l, n } => {
                let angle = PI * *k as f64 / *n as f64;
                if *l == 0 {
                    (Complex64::from_polar(1.0, angle), Complex64::new(0.0, 0.0))
                } else {
                    (Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -angle))
                }
            }
        }
    }

    /// Action on ℂ² by the SU(2) matrix.
    pub fn act(&self, z: (Complex64, Complex64)) -> (Complex64, Complex64) {
        let (a, b) = self.su2();
        (a * z.0 - b.conj() * z.1, b * z.0 + a.conj() * z.1)
    }

    pub fn project_so3(&self) -> Rotation {
        let (a, b) = self.su2();
        let numeric = rotation_from_su2(a, b);
        let exact = match self {
            GroupElement::Exact(q) => Some(q.rotation()),
            _ => None,
        };
        Rotation { numeric, exact }
    }
}

/// The projection SU(2) → SO(3) evaluated numerically.
pub fn rotation_from_su2(a: Complex64, b: Complex64) -> Matrix3<f64> {
    let ab = a * b;
    let cab = a.conj() * b;
    let s = a * a + b * b;
    let d = a * a - b * b;
    Matrix3::new(
        a.norm_sqr() - b.norm_sqr(),
        2.0 * ab.im,
        2.0 * ab.re,
        -2.0 * cab.im,
        s.re,
        -s.im,
        -2.0 * cab.re,
        d.im,
        d.re,
    )
}

#[derive(Clone, Debug)]
pub struct Rotation {
    pub numeric: Matrix3<f64>,
    pub exact: Option<[[FieldElement; 3]; 3]>,
}

#[derive(Clone, Debug)]
pub struct FiniteSubgroup {
    pub spec: GroupSpec,
    pub elements: Vec<GroupElement>,
    pub identity: usize,
    pub minus_id: Option<usize>,
    table: Vec<u32>,
    inverse: Vec<usize>,
    orders: Vec<u32>,
}

impl FiniteSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains_minus_id(&self) -> bool {
        self.minus_id.is_some()
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order() + j] as usize
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn element_order(&self, i: usize) -> u32 {
        self.orders[i]
    }

    pub fn power(&self, i: usize, k: u64) -> usize {
        let k = (k % self.orders[i] as u64) as usize;
        (0..k).fold(self.identity, |acc, _| self.mul(acc, i))
    }

    pub fn find(&self, e: &GroupElement) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }
}

fn dihedral(k: u32, l: u32, n: u32) -> GroupElement {
    GroupElement::Dihedral { k, l, n }
}

fn generators(spec: GroupSpec) -> (GroupElement, Vec<GroupElement>) {
    let half = |n| FieldElement::from_ratio(n, 2);
    let q = |w, x, y, z| GroupElement::Exact(Quaternion::new(w, x, y, z));
    let zero = FieldElement::zero;
    let hurwitz = q(half(1), half(1), half(1), half(1));
    let i = GroupElement::Exact(Quaternion::i());
    let one = GroupElement::Exact(Quaternion::one());
    match spec {
        GroupSpec::Cyclic(n) => (GroupElement::Cyclic { k: 0, n }, vec![GroupElement::Cyclic { k: 1, n }]),
        GroupSpec::BinaryDihedral(n) => (dihedral(0, 0, n), vec![dihedral(1, 0, n), dihedral(0, 1, n)]),
        GroupSpec::BinaryTetrahedral => (one, vec![hurwitz, i]),
        GroupSpec::BinaryOctahedral => {
            let r = FieldElement::sqrt2().checked_div(&FieldElement::from_ratio(2, 1)).unwrap();
            (one, vec![hurwitz, i, q(r.clone(), r, zero(), zero())])
        }
        GroupSpec::BinaryIcosahedral => {
            // (φ + φ⁻¹i + j)/2, an even permutation of (0, 1, φ⁻¹, φ)/2.
            let phi = FieldElement::phi();
            let inv_phi = &phi - &FieldElement::one();
            let two = FieldElement::from_ratio(2, 1);
            let w = phi.checked_div(&two).unwrap();
            let x = inv_phi.checked_div(&two).unwrap();
            (one, vec![hurwitz, i, q(w, x, half(1), zero())])
        }
    }
}

fn is_minus_identity(e: &GroupElement) -> bool {
    match e {
        GroupElement::Exact(q) => *q == Quaternion::one().neg(),
        GroupElement::Cyclic { k, n } => 2 * k == *n,
        GroupElement::Dihedral { k, l, n } => *l == 0 && k == n,
    }
}

/// Closure of the standard generators, identity first then breadth-first.
/// The multiplication table is assembled from right multiplication by
/// generators along the breadth-first tree, so it stays exact.
pub fn enumerate(spec: GroupSpec) -> Result<FiniteSubgroup> {
    let bound = spec.order();
    let (identity, gens) = generators(spec);
    let mut index: HashMap<GroupElement, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    index.insert(identity, 0);
    // Element c was first reached as parent[c]·gens[via[c]].
    let mut parent = vec![0usize];
    let mut via = vec![usize::MAX];
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < elements.len() {
        let mut row = Vec::with_capacity(gens.len());
        for (s, g) in gens.iter().enumerate() {
            let p = elements[i].mul(g);
            let id = match index.get(&p) {
                Some(&id) => id,
                None => {
                    if elements.len() == bound {
                        return Err(Error::BadGenerators { bound });
                    }
                    let id = elements.len();
                    index.insert(p.clone(), id);
                    elements.push(p);
                    parent.push(i);
                    via.push(s);
                    id
                }
            };
            row.push(id);
        }
        right.push(row);
        i += 1;
    }
    if elements.len() != bound {
        return Err(Error::Verification(format!(
            "{spec} closed to {} elements, expected {bound}",
            elements.len()
        )));
    }
    let n = elements.len();
    let mut table = vec![0u32; n * n];
    for i in 0..n {
        table[i * n] = i as u32;
        for c in 1..n {
            let left = table[i * n + parent[c]] as usize;
            table[i * n + c] = right[left][via[c]] as u32;
        }
    }
    let inverse: Vec<usize> = (0..n)
        .map(|i| (0..n).find(|&j| table[i * n + j] == 0).expect("group has inverses"))
        .collect();
    let orders = (0..n)
        .map(|i| {
            let mut acc = i;
            let mut ord = 1;
            while acc != 0 {
                acc = table[acc * n + i] as usize;
                ord += 1;
            }
            ord
        })
        .collect();
    let minus_id = elements.iter().position(is_minus_identity);
    Ok(FiniteSubgroup { spec, elements, identity: 0, minus_id, table, inverse, orders })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjClass {
    pub representative: usize,
    pub members: Vec<usize>,
    pub element_order: u32,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassPartition {
    pub classes: Vec<ConjClass>,
    pub class_of: Vec<usize>,
}

impl ClassPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn label_of(&self, element: usize) -> &str {
        &self.classes[self.class_of[element]].label
    }
}

/// Partition into conjugacy classes, ordered by first member. Polyhedral
/// classes sharing an element order get provisional numeric suffixes; the
/// homotopy module replaces them with the A/B convention.
pub fn conjugacy_classes(g: &FiniteSubgroup) -> ClassPartition {
    let n = g.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<ConjClass> = Vec::new();
    for e in 0..n {
        if class_of[e] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members: Vec<usize> = (0..n).map(|x| g.mul(g.mul(x, e), g.inverse(x))).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class_of[m] = id;
        }
        classes.push(ConjClass { representative: e, members, element_order: g.element_order(e), label: String::new() });
    }
    for c in classes.iter_mut() {
        c.label = base_label(g, c);
    }
    if let Some(letter) = g.spec.polyhedral_letter() {
        let mut seen: HashMap<u32, usize> = HashMap::new();
        for c in classes.iter_mut() {
            if c.element_order > 2 {
                let count = seen.entry(c.element_order).or_insert(0);
                *count += 1;
                c.label = format!("{letter}_{{{},{}}}", c.element_order, count);
            }
        }
        let unique: Vec<u32> = seen.iter().filter(|(_, &c)| c == 1).map(|(&o, _)| o).collect();
        for c in classes.iter_mut() {
            if unique.contains(&c.element_order) {
                c.label = format!("{letter}_{}", c.element_order);
            }
        }
    }
    ClassPartition { classes, class_of }
}

fn base_label(g: &FiniteSubgroup, c: &ConjClass) -> String {
    if c.representative == g.identity {
        return "Id".into();
    }
    if Some(c.representative) == g.minus_id {
        return "-Id".into();
    }
    match g.elements[c.representative] {
        GroupElement::Cyclic { k, .. } => format!("g^{k}"),
        GroupElement::Dihedral { l: 1, .. } => {
            let even = c.members.iter().any(|&m| matches!(g.elements[m], GroupElement::Dihedral { k: 0, .. }));
            if even { "B".into() } else { "AB".into() }
        }
        GroupElement::Dihedral { n, .. } => {
            let m = c
                .members
                .iter()
                .map(|&i| match g.elements[i] {
                    GroupElement::Dihedral { k, .. } => k.min(2 * n - k),
                    _ => unreachable!(),
                })
                .min()
                .unwrap();
            format!("A^{m}")
        }
        GroupElement::Exact(_) => String::new(),
    }
}

pub fn project_so3(g: &GroupElement) -> Rotation {
    g.project_so3()
}

/// The image H = P(G) ⊂ SO(3), one rotation per coset of {±Id}.
#[derive(Clone, Debug)]
pub struct RotationGroup {
    pub rotations: Vec<Rotation>,
    /// Elements of G over each rotation.
    pub preimages: Vec<Vec<usize>>,
    /// Rotation index of each element of G.
    pub of_element: Vec<usize>,
}

impl RotationGroup {
    pub fn order(&self) -> usize {
        self.rotations.len()
    }
}

pub fn image_h(g: &FiniteSubgroup) -> RotationGroup {
    let mut rotations = Vec::new();
    let mut preimages: Vec<Vec<usize>> = Vec::new();
    let mut of_element = vec![usize::MAX; g.order()];
    for e in 0..g.order() {
        if of_element[e] != usize::MAX {
            continue;
        }
        let id = rotations.len();
        let mut pre = vec![e];
        of_element[e] = id;
        if let Some(m) = g.minus_id {
            let neg = g.mul(e, m);
            of_element[neg] = id;
            pre.push(neg);
        }
        rotations.push(g.elements[e].project_so3());
        preimages.push(pre);
    }
    RotationGroup { rotations, preimages, of_element }
}

/// θ/π for the eigenvalues `e^{±iθ}` of a non-central element, reconstructed
/// exactly as `2j/ord(g)`.
pub fn eigen_angle(g: &FiniteSubgroup, e: usize) -> Result<Rational64> {
    if e == g.identity || Some(e) == g.minus_id {
        return Err(Error::Degenerate("±Id has a full eigenspace".into()));
    }
    let ord = g.element_order(e) as i64;
    let cos = g.elements[e].su2().0.re;
    (0..=ord / 2)
        .find(|&j| ((2.0 * PI * j as f64 / ord as f64).cos() - cos).abs() < 1e-9)
        .map(|j| Rational64::new(2 * j, ord))
        .ok_or_else(|| Error::Numeric(format!("no angle 2πj/{ord} matches cos θ = {cos}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["cyclic:5", "dihedral:3", "tetrahedral", "octahedral", "icosahedral"] {
            assert_eq!(s.parse::<GroupSpec>().unwrap().to_string(), s);
        }
        assert!("cyclic:1".parse::<GroupSpec>().is_err());
        assert!("dihedral:65".parse::<GroupSpec>().is_err());
        assert!("klein".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn dihedral_relations() {
        let n = 5;
        let a = dihedral(1, 0, n);
        let b = dihedral(0, 1, n);
        let minus = dihedral(n, 0, n);
        assert_eq!(b.mul(&b), minus);
        let an = (1..n).fold(a.clone(), |acc, _| acc.mul(&a));
        assert_eq!(an, minus);
        let b_inv = b.mul(&minus);
        let a_inv = dihedral(2 * n - 1, 0, n);
        assert_eq!(b.mul(&a).mul(&b_inv), a_inv);
    }

    #[test]
    fn presented_multiplication_matches_matrices() {
        let g = enumerate(GroupSpec::BinaryDihedral(4)).unwrap();
        for i in 0..g.order() {
            for j in 0..g.order() {
                let (a1, b1) = g.elements[i].su2();
                let (a2, b2) = g.elements[j].su2();
                let (a, b) = g.elements[g.mul(i, j)].su2();
                assert!((a - (a1 * a2 - b1.conj() * b2)).norm() < 1e-12);
                assert!((b - (b1 * a2 + a1.conj() * b2)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate(GroupSpec::BinaryDihedral(3)).unwrap().order(), 12);
        assert_eq!(enumerate(GroupSpec::BinaryIcosahedral).unwrap().order(), 120);
        let t = enumerate(GroupSpec::BinaryTetrahedral).unwrap();
        assert_eq!(t.order(), 24);
        assert_eq!((0..24).filter(|&i| t.element_order(i) == 2).count(), 1);
    }

    #[test]
    fn class_counts() {
        assert_eq!(conjugacy_classes(&enumerate(GroupSpec::Cyclic(5)).unwrap()).len(), 5);
        assert_eq!(conjugacy_classes(&enumerate(GroupSpec::BinaryDihedral(4)).unwrap()).len(), 7);
        assert_eq!(conjugacy_classes(&enumerate(GroupSpec::BinaryOctahedral).unwrap()).len(), 8);
    }

    #[test]
    fn projection_examples() {
        let g = enumerate(GroupSpec::BinaryDihedral(3)).unwrap();
        let minus = g.minus_id.unwrap();
        assert!((g.elements[minus].project_so3().numeric - Matrix3::identity()).norm() < 1e-12);
        let b = g.find(&dihedral(0, 1, 3)).unwrap();
        let pb = g.elements[b].project_so3().numeric;
        assert!((pb - Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, 1.0, -1.0))).norm() < 1e-12);
        let a = g.find(&dihedral(1, 0, 3)).unwrap();
        let t = 2.0 * PI / 3.0;
        let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, t.cos(), -t.sin(), 0.0, t.sin(), t.cos());
        assert!((g.elements[a].project_so3().numeric - rx).norm() < 1e-12);
    }

    #[test]
    fn image_orders() {
        assert_eq!(image_h(&enumerate(GroupSpec::BinaryDihedral(3)).unwrap()).order(), 6);
        assert_eq!(image_h(&enumerate(GroupSpec::Cyclic(5)).unwrap()).order(), 5);
        assert_eq!(image_h(&enumerate(GroupSpec::BinaryIcosahedral).unwrap()).order(), 60);
    }

    #[test]
    fn eigen_angles() {
        let g = enumerate(GroupSpec::BinaryDihedral(7)).unwrap();
        assert!(eigen_angle(&g, g.minus_id.unwrap()).is_err());
        let a = g.find(&dihedral(1, 0, 7)).unwrap();
        assert_eq!(eigen_angle(&g, a).unwrap(), Rational64::new(1, 7));
        let i = enumerate(GroupSpec::BinaryIcosahedral).unwrap();
        let mut angles: Vec<Rational64> =
            (0..120).filter(|&e| i.element_order(e) == 10).map(|e| eigen_angle(&i, e).unwrap()).collect();
        angles.sort();
        angles.dedup();
        assert_eq!(angles, vec![Rational64::new(1, 5), Rational64::new(3, 5)]);
    }
}
