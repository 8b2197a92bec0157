//! Free homotopy classes of Reeb orbits as conjugacy classes of G, found by
//! lifting each exceptional fiber to S³; exhaustive checks of the
//! index/action comparison and of the bad-building index computation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{ClassPartition, Family, FiniteSubgroup};
use crate::orbifold::{Orbifold, PointKind};
use crate::reeb::{cz_index, ActionForm, ReebOrbit};
use crate::Analysis;

pub const LIFT_TOL: f64 = 1e-7;

/// A point of S³ over `p` under the Hopf map
/// `(α, β) ↦ (|α|²−|β|², −2Im(ᾱβ), −2Re(ᾱβ))`.
pub fn fiber_point(p: [f64; 3]) -> (Complex64, Complex64) {
    let [x, y, z] = p;
    if (1.0 + x).abs() < 1e-15 {
        return (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let a = ((1.0 + x) / 2.0).sqrt();
    let b = -Complex64::new(z, y) / (2.0 * a);
    (Complex64::new(a, 0.0), b)
}

pub fn hopf(z: (Complex64, Complex64)) -> [f64; 3] {
    let (a, b) = z;
    let c = a.conj() * b;
    [a.norm_sqr() - b.norm_sqr(), -2.0 * c.im, -2.0 * c.re]
}

/// The unique element h with `h·z = e^{2πi·turns}·z`.
pub fn element_with_phase(g: &FiniteSubgroup, z: (Complex64, Complex64), turns: f64) -> Result<usize> {
    let phase = Complex64::from_polar(1.0, 2.0 * PI * turns);
    let target = (phase * z.0, phase * z.1);
    let hits: Vec<usize> = (0..g.order())
        .filter(|&e| {
            let w = g.elements[e].act(z);
            ((w.0 - target.0).norm_sqr() + (w.1 - target.1).norm_sqr()).sqrt() < LIFT_TOL
        })
        .collect();
    match hits.as_slice() {
        [e] => Ok(*e),
        [] => Err(Error::Geometry(format!("no element rotates the fiber by {turns} turns"))),
        _ => Err(Error::Geometry(format!("{} elements rotate the fiber by {turns} turns", hits.len()))),
    }
}

/// The element g with `g·z = e^{2πi/d}·z` for the fiber over `p`; the
/// embedded orbit over `p` is freely homotopic to `[g]`.
pub fn orbit_lift(g: &FiniteSubgroup, p: [f64; 3], d: u64) -> Result<usize> {
    element_with_phase(g, fiber_point(p), 1.0 / d as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassAssignment {
    /// Lift element of each orbifold point's embedded orbit.
    pub lifts: Vec<usize>,
}

impl ClassAssignment {
    pub fn build(g: &FiniteSubgroup, classes: &ClassPartition, orbifold: &Orbifold) -> Result<Self> {
        let mut lifts = Vec::new();
        for p in &orbifold.points {
            let lift = orbit_lift(g, p.representative, p.d)?;
            // Every point of the orbit must give a conjugate lift.
            for fp in orbifold.fixed.iter().filter(|f| f.orbit_id == p.orbit_id) {
                let other = orbit_lift(g, fp.direction, p.d)?;
                if classes.class_of[other] != classes.class_of[lift] {
                    return Err(Error::Geometry(format!("lifts over the {} orbit are not conjugate", p.name)));
                }
            }
            if g.element_order(lift) as u64 != p.d {
                return Err(Error::Geometry(format!(
                    "lift over {} has order {}, expected {}",
                    p.name,
                    g.element_order(lift),
                    p.d
                )));
            }
            lifts.push(lift);
        }
        Ok(ClassAssignment { lifts })
    }

    /// Element representing the class of the k-th iterate over `base`.
    pub fn element(&self, g: &FiniteSubgroup, base: usize, k: u64) -> usize {
        g.power(self.lifts[base], k)
    }

    pub fn class(&self, g: &FiniteSubgroup, classes: &ClassPartition, base: usize, k: u64) -> usize {
        classes.class_of[self.element(g, base, k)]
    }
}

/// Replace provisional polyhedral labels: of two classes with equal element
/// order, `A` is the one reached by the smallest vertex iterate.
pub fn canonical_labels(g: &FiniteSubgroup, classes: &mut ClassPartition, orbifold: &Orbifold, lifts: &ClassAssignment) {
    let Some(letter) = g.spec.polyhedral_letter() else { return };
    let order_of_first = |kind: PointKind| -> Vec<(usize, u64)> {
        let base = orbifold.points.iter().position(|p| p.kind == kind).unwrap();
        let d = orbifold.points[base].d;
        (1..=d).map(|k| (lifts.class(g, classes, base, k), k)).collect()
    };
    // Rank of each class: first vertex iterate, then face, then edge.
    let mut rank = vec![(u64::MAX, u64::MAX, u64::MAX); classes.len()];
    for (slot, kind) in [(0, PointKind::Min), (1, PointKind::Max), (2, PointKind::Saddle)] {
        for (c, k) in order_of_first(kind) {
            let r = &mut rank[c];
            let cur = match slot {
                0 => &mut r.0,
                1 => &mut r.1,
                _ => &mut r.2,
            };
            *cur = (*cur).min(k);
        }
    }
    let mut orders: Vec<u32> = classes.classes.iter().map(|c| c.element_order).collect();
    orders.sort_unstable();
    orders.dedup();
    for ord in orders.into_iter().filter(|&o| o > 2) {
        let mut same: Vec<usize> = (0..classes.len()).filter(|&c| classes.classes[c].element_order == ord).collect();
        if same.len() == 1 {
            classes.classes[same[0]].label = format!("{letter}_{ord}");
            continue;
        }
        same.sort_by_key(|&c| rank[c]);
        for (i, c) in same.into_iter().enumerate() {
            let tag = (b'A' + i as u8) as char;
            classes.classes[c].label = format!("{letter}_{{{ord},{tag}}}");
        }
    }
}

/// Iterates `name^{r + dk}` of one embedded orbit; `r = 0` stands for `dk`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub point: String,
    pub r: u64,
    pub d: u64,
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 0 {
            write!(f, "{}^{{{}k}}", self.point, self.d)
        } else {
            write!(f, "{}^{{{}+{}k}}", self.point, self.r, self.d)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRow {
    pub label: String,
    pub element_order: u32,
    pub residues: Vec<Residue>,
}

/// For each conjugacy class, the residues of iterates landing in it.
pub fn class_table(a: &Analysis) -> Vec<ClassRow> {
    let mut rows: Vec<ClassRow> = a
        .classes
        .classes
        .iter()
        .map(|c| ClassRow { label: c.label.clone(), element_order: c.element_order, residues: Vec::new() })
        .collect();
    for (base, p) in a.orbifold.points.iter().enumerate() {
        for k in 1..=p.d {
            let c = a.lifts.class(&a.group, &a.classes, base, k);
            rows[c].residues.push(Residue { point: p.name.clone(), r: k % p.d, d: p.d });
        }
    }
    for row in rows.iter_mut() {
        row.residues.sort_by_key(|r| r.r);
        let order = |name: &str| a.orbifold.points.iter().position(|p| p.name == name);
        row.residues.sort_by_key(|r| order(&r.point));
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Antipodal fixed points carry inverse classes, `[γ_p] = [γ_{−p}^{d−1}]`,
/// plus the named identities and inequalities for the polyhedral groups.
pub fn antipodal_and_distinguish_checks(a: &Analysis) -> Result<Vec<Check>> {
    let g = &a.group;
    let mut checks = Vec::new();
    for fp in &a.orbifold.fixed {
        let anti = [-fp.direction[0], -fp.direction[1], -fp.direction[2]];
        let Some(other) = a
            .orbifold
            .fixed
            .iter()
            .find(|f| (0..3).all(|i| (f.direction[i] - anti[i]).abs() < 1e-9))
        else {
            continue;
        };
        let d = a.orbifold.points.iter().find(|p| p.orbit_id == fp.orbit_id).unwrap().d;
        let here = orbit_lift(g, fp.direction, d)?;
        let there = orbit_lift(g, other.direction, d)?;
        checks.push(Check {
            name: format!("antipodal {:?}", fp.direction.map(|x| (x * 1e6).round() / 1e6 + 0.0)),
            passed: a.classes.class_of[here] == a.classes.class_of[g.power(there, d - 1)],
        });
    }
    if g.spec.family() == Family::Polyhedral {
        let idx = |kind| a.orbifold.points.iter().position(|p| p.kind == kind).unwrap();
        let (v, e, f) = (idx(PointKind::Min), idx(PointKind::Saddle), idx(PointKind::Max));
        let cls = |base, k| a.lifts.class(g, &a.classes, base, k);
        let mut named = |name: &str, ok: bool| checks.push(Check { name: name.into(), passed: ok });
        match g.spec {
            crate::groups::GroupSpec::BinaryTetrahedral => {
                named("[V] = [F^5]", cls(v, 1) == cls(f, 5));
                named("[V^2] != [F^2]", cls(v, 2) != cls(f, 2));
            }
            crate::groups::GroupSpec::BinaryOctahedral => {
                named("[V] = [V^7]", cls(v, 1) == cls(v, 7));
                named("[E] != [V^2]", cls(e, 1) != cls(v, 2));
                named("[V] != [V^3]", cls(v, 1) != cls(v, 3));
            }
            _ => {
                named("[V] = [V^9]", cls(v, 1) == cls(v, 9));
                named("[V^2] != [V^4]", cls(v, 2) != cls(v, 4));
            }
        }
    }
    Ok(checks)
}

/// Whether `π(c0⁺ + c1⁺ε_N) < π(c0⁻ + c1⁻ε_M)` for all sufficiently small
/// perturbation parameters. On one level ε is shared; across levels the two
/// parameters are independent and both arbitrarily small.
pub fn action_less_for_all_small(plus: &ActionForm, minus: &ActionForm) -> bool {
    if plus.level == minus.level {
        return (plus.c0, plus.c1) < (minus.c0, minus.c1);
    }
    let zero = num_rational::Rational64::from_integer(0);
    plus.c0 < minus.c0
        || (plus.c0 == minus.c0 && plus.c1 <= zero && zero <= minus.c1 && (plus.c1, minus.c1) != (zero, zero))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropReport {
    pub pairs_checked: usize,
    pub counterexamples: Vec<String>,
}

/// Over all same-class pairs `(γ⁺, γ⁻)` from levels N ≤ M: equal index forces
/// the same base point and iterate, and smaller index forces smaller action.
pub fn verify_prop_cz_action(a: &Analysis, n: u32, m: u32) -> Result<PropReport> {
    if n > m {
        return Err(Error::InvalidArgument(format!("levels must satisfy N ≤ M, got {n} > {m}")));
    }
    let plus = a.orbits(n)?;
    let minus = a.orbits(m)?;
    let class = |o: &ReebOrbit| a.lifts.class(&a.group, &a.classes, o.base, o.k);
    let plus_cls: Vec<usize> = plus.iter().map(class).collect();
    let minus_cls: Vec<usize> = minus.iter().map(class).collect();
    let mut report = PropReport::default();
    for (p, pc) in plus.iter().zip(&plus_cls) {
        for (q, qc) in minus.iter().zip(&minus_cls) {
            if pc != qc {
                continue;
            }
            report.pairs_checked += 1;
            if p.cz == q.cz && (p.base != q.base || p.k != q.k) {
                report.counterexamples.push(format!(
                    "equal index {} for {} (level {n}) and {} (level {m})",
                    p.cz,
                    p.label(),
                    q.label()
                ));
            }
            if p.cz < q.cz && !action_less_for_all_small(&p.action, &q.action) {
                report.counterexamples.push(format!(
                    "{} (level {n}, CZ {}, {}) not below {} (level {m}, CZ {}, {})",
                    p.label(),
                    p.cz,
                    p.action,
                    q.label(),
                    q.cz,
                    q.action
                ));
            }
        }
    }
    Ok(report)
}

/// Index `k − 1 + μ(top) − Σ μ(bottom_i)` of a genus-zero building level
/// with one positive end and k ≥ 1 negative ends.
pub fn building_index(top: &ReebOrbit, bottoms: &[ReebOrbit]) -> Result<i64> {
    if bottoms.is_empty() {
        return Err(Error::Unsupported("building with no negative ends; use plane_index".into()));
    }
    Ok(bottoms.len() as i64 - 1 + top.cz - bottoms.iter().map(|b| b.cz).sum::<i64>())
}

/// Index `μ − 1` of a plane asymptotic to `top`.
pub fn plane_index(top: &ReebOrbit) -> i64 {
    top.cz - 1
}

#[derive(Clone, Debug, Serialize)]
pub struct BadBuildingReport {
    pub orbit: String,
    pub d2: u64,
    /// `(d1, index of the pair of pants)`.
    pub rows: Vec<(u64, i64)>,
    pub plane_index: i64,
    pub passed: bool,
}

/// The pair of pants from `γ^{d1+d2}` to `γ^{d1}` and the index-2 plane
/// `γ^{d2}` over the exceptional minimum has index 2 for every d1, so it
/// cannot appear in a rigid building.
pub fn bad_building_exclusion(a: &Analysis, d1_max: u64) -> Result<BadBuildingReport> {
    let base = a.orbifold.points.iter().position(|p| p.kind == PointKind::Min).unwrap();
    let p = &a.orbifold.points[base];
    let d2 = p.d;
    let orbit = |k| ReebOrbit::new(base, &p.name, p.kind, p.d, k, 1);
    let leg = orbit(d2);
    let plane = plane_index(&leg);
    let mut rows = Vec::new();
    let mut passed = leg.cz == 3 && plane == 2;
    for d1 in 1..=d1_max {
        let top = orbit(d1 + d2);
        let ind = building_index(&top, &[orbit(d1), leg.clone()])?;
        let closed = 1 + cz_index(PointKind::Min, d2, d1 + d2) - cz_index(PointKind::Min, d2, d1) - 3;
        passed &= ind == 2 && closed == ind;
        rows.push((d1, ind));
    }
    Ok(BadBuildingReport { orbit: p.name.clone(), d2, rows, plane_index: plane, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn fiber_point_examples() {
        let (a, b) = fiber_point([1.0, 0.0, 0.0]);
        assert_eq!((a, b), (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        let (a, b) = fiber_point([-1.0, 0.0, 0.0]);
        assert_eq!((a, b), (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
        let z = fiber_point([0.0, 1.0, 0.0]);
        let r = 0.5f64.sqrt();
        assert!((z.0 - Complex64::new(r, 0.0)).norm() < 1e-12);
        assert!((z.1 - Complex64::new(0.0, -r)).norm() < 1e-12);
        let back = hopf(z);
        assert!((back[0]).abs() < 1e-12 && (back[1] - 1.0).abs() < 1e-12 && back[2].abs() < 1e-12);
    }

    #[test]
    fn action_comparison_examples() {
        let r = |n, d| Rational64::new(n, d);
        let f = |level, c0, c1| ActionForm { level, c0, c1 };
        let k = 3;
        assert!(action_less_for_all_small(&f(1, r(2 * k, 1), r(-2 * k, 1)), &f(2, r(2 * k, 1), r(0, 1))));
        assert!(!action_less_for_all_small(&f(1, r(2 * k, 1), r(0, 1)), &f(2, r(2 * k, 1), r(-2 * k, 1))));
        assert!(action_less_for_all_small(&f(1, r(2, 1), r(2, 1)), &f(2, r(4, 1), r(-4, 1))));
        assert!(!action_less_for_all_small(&f(1, r(2, 1), r(0, 1)), &f(2, r(2, 1), r(0, 1))));
        assert!(action_less_for_all_small(&f(2, r(2, 1), r(-2, 1)), &f(2, r(2, 1), r(0, 1))));
    }

    #[test]
    fn building_index_examples() {
        let o = |k| ReebOrbit::new(0, "e-", PointKind::Min, 4, k, 1);
        assert_eq!(building_index(&o(5), &[o(5)]).unwrap(), 0);
        assert_eq!(building_index(&o(5), &[o(3)]).unwrap(), 2);
        assert!(building_index(&o(5), &[]).is_err());
    }
}
