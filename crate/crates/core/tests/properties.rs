mod common;

use std::collections::BTreeMap;

use common::{analyses, analysis};
use mckay_ch::exactfield::{FieldElement, Quaternion};
use mckay_ch::groups::{GroupElement, GroupSpec};
use mckay_ch::homology::{compose, filtered_complex, inclusion};
use mckay_ch::orbifold::PointKind;
use mckay_ch::reeb::{threshold, ReebOrbit};
use num_bigint::BigInt;
use num_integer::gcd;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn field() -> impl Strategy<Value = FieldElement> {
    (rational(), rational(), rational(), rational()).prop_map(|(a, b, c, d)| FieldElement::new(a, b, c, d))
}

fn group_index() -> impl Strategy<Value = usize> {
    0..analyses().len()
}

fn exact(e: &GroupElement) -> &Quaternion {
    match e {
        GroupElement::Exact(q) => q,
        other => panic!("not a quaternion: {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn field_multiplication_is_associative(a in field(), b in field(), c in field()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn field_distributes(a in field(), b in field(), c in field()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn field_inverse_round_trips(a in field()) {
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(&a * &inv, FieldElement::one());
        prop_assert_eq!(inv.inverse().unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn quaternion_norm_is_multiplicative(which in 0usize..3, i in 0usize..120, j in 0usize..120) {
        let spec = [GroupSpec::BinaryTetrahedral, GroupSpec::BinaryOctahedral, GroupSpec::BinaryIcosahedral][which];
        let g = &analysis(spec).group;
        let (p, q) = (exact(&g.elements[i % g.order()]), exact(&g.elements[j % g.order()]));
        prop_assert_eq!((p * q).norm_sq(), &p.norm_sq() * &q.norm_sq());
        prop_assert_eq!(p.norm_sq(), FieldElement::one());
    }

    #[test]
    fn projection_is_a_homomorphism(idx in group_index(), i in 0usize..120, j in 0usize..120) {
        let g = &analysis(analyses()[idx].spec).group;
        let (x, y) = (&g.elements[i % g.order()], &g.elements[j % g.order()]);
        let lhs = x.mul(y).project_so3().numeric;
        let rhs = x.project_so3().numeric * y.project_so3().numeric;
        prop_assert!((lhs - rhs).abs().max() < 1e-12);
        if let (Some(a), Some(b), Some(c)) = (x.project_so3().exact, y.project_so3().exact, x.mul(y).project_so3().exact) {
            for r in 0..3 {
                for s in 0..3 {
                    let sum = (0..3).fold(FieldElement::zero(), |acc, t| &acc + &(&a[r][t] * &b[t][s]));
                    prop_assert_eq!(&sum, &c[r][s]);
                }
            }
        }
    }
}

#[test]
fn classes_partition_and_sizes_divide_order() {
    for a in analyses() {
        let sizes: Vec<usize> = a.classes.classes.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), a.group.order(), "{}", a.spec);
        assert!(sizes.iter().all(|s| a.group.order() % s == 0), "{}", a.spec);
        let mut seen = vec![false; a.group.order()];
        for c in &a.classes.classes {
            for &x in &c.members {
                assert!(!seen[x], "{} element {x} in two classes", a.spec);
                seen[x] = true;
            }
        }
    }
}

/// Per-family closed forms of (μ_CZ, c0, c1) with the family's own parameters,
/// independent of the multiplicity d used by the unified formulas.
fn per_family(spec: GroupSpec, kind: PointKind, k: i64) -> (i64, Rational64, Rational64) {
    let ceil = |p: i64, q: i64| Rational64::new(p, q).ceil().to_integer();
    let floor = |p: i64, q: i64| Rational64::new(p, q).floor().to_integer();
    let zero = Rational64::from_integer(0);
    match (spec, kind) {
        (GroupSpec::Cyclic(n), PointKind::Min) => {
            let c = Rational64::new(2 * k, n as i64);
            (2 * ceil(2 * k, n as i64) - 1, c, -c)
        }
        (GroupSpec::Cyclic(n), PointKind::Max) => {
            let c = Rational64::new(2 * k, n as i64);
            (2 * floor(2 * k, n as i64) + 1, c, c)
        }
        (GroupSpec::BinaryDihedral(_), PointKind::Min) => (2 * ceil(k, 2) - 1, Rational64::new(k, 2), -Rational64::new(k, 2)),
        (GroupSpec::BinaryDihedral(_), PointKind::Saddle) => (k, Rational64::new(k, 2), zero),
        (GroupSpec::BinaryDihedral(n), PointKind::Max) => {
            let c = Rational64::new(k, n as i64);
            (2 * floor(k, n as i64) + 1, c, c)
        }
        (_, PointKind::Saddle) => (k, Rational64::new(k, 2), zero),
        (s, kind) => {
            let (iv, if_) = match s {
                GroupSpec::BinaryTetrahedral => (3, 3),
                GroupSpec::BinaryOctahedral => (4, 3),
                _ => (5, 3),
            };
            if kind == PointKind::Min {
                (2 * ceil(k, iv) - 1, Rational64::new(k, iv), -Rational64::new(k, iv))
            } else {
                (2 * floor(k, if_) + 1, Rational64::new(k, if_), Rational64::new(k, if_))
            }
        }
    }
}

#[test]
fn unified_formulas_match_per_family_formulas() {
    for a in analyses() {
        for (base, p) in a.orbifold.points.iter().enumerate() {
            for k in 1..=10 * p.d {
                let o = ReebOrbit::new(base, &p.name, p.kind, p.d, k, 1);
                let (cz, c0, c1) = per_family(a.spec, p.kind, k as i64);
                assert_eq!(o.cz, cz, "{} {}^{k}", a.spec, p.name);
                assert_eq!((o.action.c0, o.action.c1), (c0, c1), "{} {}^{k}", a.spec, p.name);
            }
        }
    }
}

#[test]
fn index_and_action_are_monotone_in_the_iterate() {
    for a in analyses() {
        for (base, p) in a.orbifold.points.iter().enumerate() {
            let orbits: Vec<ReebOrbit> = (1..=10 * p.d).map(|k| ReebOrbit::new(base, &p.name, p.kind, p.d, k, 1)).collect();
            for w in orbits.windows(2) {
                assert!(w[0].cz <= w[1].cz, "{} {}", a.spec, w[1].label());
                assert!(w[0].action.c0 < w[1].action.c0, "{} {}", a.spec, w[1].label());
            }
        }
    }
}

#[test]
fn no_action_ties_a_threshold() {
    for a in analyses() {
        for n in 1..=8 {
            let limit = threshold(a.spec, n);
            for (base, p) in a.orbifold.points.iter().enumerate() {
                for k in 1..=(4 * n as u64 * p.d) {
                    let o = ReebOrbit::new(base, &p.name, p.kind, p.d, k, n);
                    assert_ne!(o.action.c0, limit, "{} {} at level {n}", a.spec, o.label());
                }
            }
            a.orbits(n).unwrap();
        }
    }
}

#[test]
fn good_orbits_are_exactly_the_even_graded_ones() {
    for a in analyses() {
        for o in a.orbits(4).unwrap() {
            let bad = o.kind == PointKind::Saddle && o.k % 2 == 0;
            assert_eq!(o.good, !bad, "{} {}", a.spec, o.label());
            if o.good {
                assert_eq!(o.grading % 2, 0, "{} {}", a.spec, o.label());
            }
        }
    }
}

#[test]
fn class_assignment_respects_iteration() {
    for a in analyses() {
        let g = &a.group;
        for (base, p) in a.orbifold.points.iter().enumerate() {
            let gen = a.lifts.element(g, base, 1);
            for k in 1..=4 * p.d {
                let c = a.lifts.class(g, &a.classes, base, k);
                assert_eq!(c, a.classes.class_of[g.power(gen, k)], "{} {}^{k}", a.spec, p.name);
                let order = a.classes.classes[c].element_order as u64;
                assert_eq!(order, p.d / gcd(p.d, k), "{} {}^{k}", a.spec, p.name);
                assert_eq!(order == 1, k % p.d == 0, "{} {}^{k}", a.spec, p.name);
            }
        }
    }
}

fn independent_ranks(m: usize, level: u32) -> BTreeMap<i64, usize> {
    let top = 4 * level as i64 - 2;
    let mut r = BTreeMap::new();
    r.insert(0, m - 1);
    let mut deg = 2;
    while deg < top {
        r.insert(deg, m);
        deg += 2;
    }
    r.insert(top, m - 1);
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filtered_ranks_follow_the_closed_form(idx in group_index(), level in 1u32..=4) {
        let a = &analyses()[idx];
        let complex = filtered_complex(&a.orbits(level).unwrap(), level).unwrap();
        let ranks = complex.homology_ranks();
        prop_assert_eq!(&ranks, &independent_ranks(a.m(), level));
        prop_assert_eq!(complex.generators.len(), ranks.values().sum::<usize>());
    }

    #[test]
    fn ranks_are_stable_below_the_filtration_edge(idx in group_index(), n in 1u32..=3, extra in 1u32..=2) {
        let a = &analyses()[idx];
        let m = n + extra;
        let low = filtered_complex(&a.orbits(n).unwrap(), n).unwrap().homology_ranks();
        let high = filtered_complex(&a.orbits(m).unwrap(), m).unwrap().homology_ranks();
        let edge = 4 * n as i64 - 2;
        for (deg, r) in &low {
            if *deg < edge {
                prop_assert_eq!(Some(r), high.get(deg));
            }
        }
        prop_assert_eq!(low[&edge] + 1, high[&edge]);
    }

    #[test]
    fn inclusions_compose(idx in group_index(), l in 1u32..=4, dn in 0u32..=3, dm in 0u32..=3) {
        let a = &analyses()[idx];
        let n = (l + dn).min(4);
        let m = (n + dm).min(4);
        let ln = inclusion(a, l, n).unwrap();
        let nm = inclusion(a, n, m).unwrap();
        let lm = inclusion(a, l, m).unwrap();
        let composed = compose(&ln, &nm).unwrap();
        prop_assert_eq!(&composed.pairs, &lm.pairs);
        let mut targets: Vec<usize> = lm.pairs.iter().map(|p| p.1).collect();
        targets.sort_unstable();
        targets.dedup();
        prop_assert_eq!(targets.len(), lm.pairs.len());
    }
}
