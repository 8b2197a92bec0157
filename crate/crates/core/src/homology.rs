//! Filtered chain complexes generated by good Reeb orbits, their homology,
//! the inclusions between filtration levels, and the direct limit.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::reeb::{ser_ratio, threshold, ReebOrbit};
use crate::Analysis;

/// Degree → rank, finitely supported.
pub type GradedRanks = BTreeMap<i64, usize>;

#[derive(Clone, Debug, Serialize)]
pub struct FilteredComplex {
    pub level: u32,
    pub generators: Vec<ReebOrbit>,
    /// `∂(generator i) = Σ coefficient · generator j`.
    #[serde(serialize_with = "ser_differential")]
    pub differential: Vec<Vec<(usize, Rational64)>>,
}

fn ser_differential<S: Serializer>(d: &[Vec<(usize, Rational64)>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<(usize, String)>> =
        d.iter().map(|row| row.iter().map(|(j, c)| (*j, c.to_string())).collect()).collect();
    text.serialize(s)
}

impl FilteredComplex {
    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.generators.iter().map(|g| g.grading).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Matrix of `∂: C_deg → C_{deg−1}` in generator order.
    fn boundary_matrix(&self, deg: i64) -> Vec<Vec<Rational64>> {
        let rows: Vec<usize> = (0..self.generators.len()).filter(|&i| self.generators[i].grading == deg - 1).collect();
        let cols: Vec<usize> = (0..self.generators.len()).filter(|&i| self.generators[i].grading == deg).collect();
        let mut m = vec![vec![Rational64::zero(); cols.len()]; rows.len()];
        for (c, &src) in cols.iter().enumerate() {
            for &(dst, coef) in &self.differential[src] {
                if let Some(r) = rows.iter().position(|&x| x == dst) {
                    m[r][c] += coef;
                }
            }
        }
        m
    }

    pub fn homology_ranks(&self) -> GradedRanks {
        let mut out = GradedRanks::new();
        for deg in self.degrees() {
            let dim = self.generators.iter().filter(|g| g.grading == deg).count();
            let r = dim - rank(self.boundary_matrix(deg)) - rank(self.boundary_matrix(deg + 1));
            if r > 0 {
                out.insert(deg, r);
            }
        }
        out
    }
}

/// Rank over ℚ by fraction-exact Gaussian elimination.
pub fn rank(mut m: Vec<Vec<Rational64>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c];
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c] / pivot;
                for j in c..cols {
                    let sub = f * m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// The complex generated by good orbits below `L_N`. Every generator has
/// even grading, so the differential (degree −1) has no admissible target.
pub fn filtered_complex(orbits: &[ReebOrbit], level: u32) -> Result<FilteredComplex> {
    let generators: Vec<ReebOrbit> = orbits.iter().filter(|o| o.good && o.level == level).cloned().collect();
    if let Some(odd) = generators.iter().find(|g| g.grading % 2 != 0) {
        return Err(Error::Verification(format!("good generator {} has odd grading {}", odd.label(), odd.grading)));
    }
    let differential = generators
        .iter()
        .map(|g| {
            let targets: Vec<(usize, Rational64)> = generators
                .iter()
                .enumerate()
                .filter(|(_, t)| t.grading == g.grading - 1)
                .map(|(j, _)| (j, Rational64::zero()))
                .collect();
            debug_assert!(targets.is_empty());
            targets
        })
        .collect();
    Ok(FilteredComplex { level, generators, differential })
}

/// Ranks `m−1, m, …, m, m−1` in even degrees `0..=4N−2`.
pub fn closed_form_ranks(m: usize, level: u32) -> GradedRanks {
    let top = 4 * level as i64 - 2;
    (0..=top)
        .step_by(2)
        .map(|deg| (deg, if deg == 0 || deg == top { m - 1 } else { m }))
        .collect()
}

pub fn filtered_homology_ranks(a: &Analysis, level: u32) -> Result<GradedRanks> {
    let complex = filtered_complex(&a.orbits(level)?, level)?;
    let ranks = complex.homology_ranks();
    let expected = closed_form_ranks(a.m(), level);
    if ranks != expected {
        return Err(Error::Verification(format!(
            "{} level {level}: ranks {ranks:?}, closed form {expected:?}",
            a.spec
        )));
    }
    Ok(ranks)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionMap {
    pub source: u32,
    pub target: u32,
    /// `(source generator, target generator)` index pairs.
    pub pairs: Vec<(usize, usize)>,
}

/// Pairs each level-N generator with the level-M generator over the same
/// point with the same iterate.
pub fn inclusion_map(a: &Analysis, src: &FilteredComplex, tgt: &FilteredComplex) -> Result<InclusionMap> {
    if src.level > tgt.level {
        return Err(Error::InvalidArgument(format!("inclusion from level {} to {}", src.level, tgt.level)));
    }
    let mut pairs = Vec::new();
    for (i, g) in src.generators.iter().enumerate() {
        let hits: Vec<usize> = (0..tgt.generators.len())
            .filter(|&j| tgt.generators[j].base == g.base && tgt.generators[j].k == g.k)
            .collect();
        let [j] = hits.as_slice() else {
            return Err(Error::Verification(format!("{} has {} partners at level {}", g.label(), hits.len(), tgt.level)));
        };
        if tgt.generators[*j].grading != g.grading {
            return Err(Error::Verification(format!("{} changes grading under inclusion", g.label())));
        }
        pairs.push((i, *j));
    }
    let limit = threshold(a.spec, src.level);
    let mut image: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    image.sort_unstable();
    let expected: Vec<usize> = (0..tgt.generators.len()).filter(|&j| tgt.generators[j].action.c0 < limit).collect();
    if image != expected {
        return Err(Error::Verification(format!(
            "image of level {} in level {} is not the sub-threshold part",
            src.level, tgt.level
        )));
    }
    Ok(InclusionMap { source: src.level, target: tgt.level, pairs })
}

pub fn inclusion(a: &Analysis, source: u32, target: u32) -> Result<InclusionMap> {
    let src = filtered_complex(&a.orbits(source)?, source)?;
    let tgt = filtered_complex(&a.orbits(target)?, target)?;
    inclusion_map(a, &src, &tgt)
}

pub fn compose(first: &InclusionMap, second: &InclusionMap) -> Option<InclusionMap> {
    if first.target != second.source {
        return None;
    }
    let pairs = first
        .pairs
        .iter()
        .map(|&(i, j)| second.pairs.iter().find(|p| p.0 == j).map(|p| (i, p.1)))
        .collect::<Option<Vec<_>>>()?;
    Some(InclusionMap { source: first.source, target: second.target, pairs })
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectLimit {
    /// Stabilized ranks in every degree below the top filtration edge.
    pub ranks: GradedRanks,
    pub levels_checked: u32,
    /// Rank of the summand `ℚ^{m−2}` in each even degree.
    pub twisted_rank: usize,
    /// `Σ_q (d_q/2 − 1)` over orbifold points, which equals `m − 2`.
    #[serde(serialize_with = "ser_ratio")]
    pub orbifold_defect: Rational64,
    /// Ranks of `H_*(S²; ℚ)` in degrees 0, 1, 2.
    pub sphere: [usize; 3],
}

/// Direct limit over levels `1..=max_level`; each inclusion is checked to
/// be injective and ranks below each filtration edge must stabilize.
pub fn direct_limit(a: &Analysis, max_level: u32) -> Result<DirectLimit> {
    if max_level < 2 {
        return Err(Error::InvalidArgument("direct limit needs at least two levels".into()));
    }
    let complexes: Vec<FilteredComplex> =
        (1..=max_level).map(|n| filtered_complex(&a.orbits(n)?, n)).collect::<Result<_>>()?;
    for w in complexes.windows(2) {
        let inc = inclusion_map(a, &w[0], &w[1])?;
        let mut targets: Vec<usize> = inc.pairs.iter().map(|p| p.1).collect();
        targets.sort_unstable();
        targets.dedup();
        if targets.len() != inc.pairs.len() {
            return Err(Error::Verification(format!("inclusion {}→{} not injective", inc.source, inc.target)));
        }
        let (lo, hi) = (w[0].homology_ranks(), w[1].homology_ranks());
        let edge = 4 * w[0].level as i64 - 2;
        for deg in 0..edge {
            if lo.get(&deg) != hi.get(&deg) {
                return Err(Error::Verification(format!("rank in degree {deg} changes from level {}", w[0].level)));
            }
        }
    }
    let last = complexes.last().unwrap();
    let edge = 4 * last.level as i64 - 2;
    let ranks: GradedRanks = last.homology_ranks().into_iter().filter(|(d, _)| *d < edge).collect();
    let orbifold_defect = a
        .orbifold
        .points
        .iter()
        .map(|p| Rational64::new(p.d as i64, 2) - 1)
        .sum::<Rational64>();
    let m = a.m();
    if orbifold_defect != Rational64::from_integer(m as i64 - 2) {
        return Err(Error::Verification(format!("Σ(d/2 − 1) = {orbifold_defect} but m − 2 = {}", m as i64 - 2)));
    }
    Ok(DirectLimit { ranks, levels_checked: max_level, twisted_rank: m - 2, orbifold_defect, sphere: [1, 0, 1] })
}

/// Degree 0 has rank `|Conj(G)| − 1` and every even degree ≥ 2 has rank
/// `|Conj(G)|`.
pub fn mckay_rank_check(limit: &DirectLimit, m: usize) -> bool {
    !limit.ranks.is_empty()
        && limit.ranks.iter().all(|(&deg, &r)| deg % 2 == 0 && r == if deg == 0 { m - 1 } else { m })
        && limit.ranks.keys().copied().eq((0..).step_by(2).take(limit.ranks.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        let r = |n| Rational64::from_integer(n);
        assert_eq!(rank(vec![]), 0);
        assert_eq!(rank(vec![vec![r(1), r(2)], vec![r(2), r(4)]]), 1);
        assert_eq!(rank(vec![vec![r(0), r(1)], vec![r(1), r(0)], vec![r(1), r(1)]]), 2);
    }

    #[test]
    fn closed_form_shape() {
        let c = closed_form_ranks(5, 2);
        assert_eq!(c, GradedRanks::from([(0, 4), (2, 5), (4, 5), (6, 4)]));
        assert_eq!(closed_form_ranks(3, 1), GradedRanks::from([(0, 2), (2, 2)]));
    }

    use crate::groups::GroupSpec;

    fn analysis(s: &str) -> Analysis {
        Analysis::new(s.parse::<GroupSpec>().unwrap()).unwrap()
    }

    #[test]
    fn dihedral_three_level_one_generators() {
        let a = analysis("dihedral:3");
        let orbits = a.orbits(1).unwrap();
        let c = filtered_complex(&orbits, 1).unwrap();
        assert_eq!(orbits.len(), 11);
        assert_eq!(c.generators.len(), 10);
        assert_eq!(c.generators.iter().filter(|g| g.grading == 0).count(), 5);
        assert!(c.differential.iter().all(|r| r.is_empty()));
    }

    #[test]
    fn cyclic_four_has_no_saddles() {
        let a = analysis("cyclic:4");
        let orbits = a.orbits(1).unwrap();
        let c = filtered_complex(&orbits, 1).unwrap();
        assert_eq!(c.generators.len(), 6);
        assert_eq!(orbits.len(), 6);
    }

    #[test]
    fn icosahedral_grading_one_is_empty() {
        let a = analysis("icosahedral");
        let c = filtered_complex(&a.orbits(1).unwrap(), 1).unwrap();
        assert_eq!(c.generators.iter().filter(|g| g.grading == 1).count(), 0);
    }

    #[test]
    fn ranks_match_reference_examples() {
        let d = filtered_homology_ranks(&analysis("dihedral:4"), 2).unwrap();
        assert_eq!(d, GradedRanks::from([(0, 6), (2, 7), (4, 7), (6, 6)]));
        let c = filtered_homology_ranks(&analysis("cyclic:5"), 1).unwrap();
        assert_eq!(c, GradedRanks::from([(0, 4), (2, 4)]));
        let o = filtered_homology_ranks(&analysis("octahedral"), 2).unwrap();
        assert_eq!(o, GradedRanks::from([(0, 7), (2, 8), (4, 8), (6, 7)]));
    }

    #[test]
    fn generator_count_equals_total_rank() {
        for g in ["cyclic:3", "dihedral:5", "tetrahedral", "icosahedral"] {
            let a = analysis(g);
            for n in 1..=4 {
                let c = filtered_complex(&a.orbits(n).unwrap(), n).unwrap();
                let total: usize = filtered_homology_ranks(&a, n).unwrap().values().sum();
                assert_eq!(c.generators.len(), total, "{g} level {n}");
            }
        }
    }

    #[test]
    fn inclusion_examples() {
        let a = analysis("cyclic:4");
        let inc = inclusion(&a, 1, 3).unwrap();
        assert_eq!(inc.pairs.len(), 6);
        let tgt = filtered_complex(&a.orbits(3).unwrap(), 3).unwrap();
        assert_eq!(tgt.generators.len(), 22);
        let id = inclusion(&a, 2, 2).unwrap();
        assert!(id.pairs.iter().all(|(i, j)| i == j));

        let d = analysis("dihedral:3");
        let src = filtered_complex(&d.orbits(1).unwrap(), 1).unwrap();
        let tgt = filtered_complex(&d.orbits(2).unwrap(), 2).unwrap();
        let inc = inclusion_map(&d, &src, &tgt).unwrap();
        let (i, j) = inc.pairs.iter().copied().find(|&(i, _)| src.generators[i].label() == "e-^3").unwrap();
        assert_eq!(tgt.generators[j].label(), "e-^3");
        assert_eq!(src.generators[i].grading, 2);
        assert_eq!(tgt.generators[j].grading, 2);
        assert!(inclusion(&d, 2, 1).is_err());
    }

    #[test]
    fn inclusions_compose() {
        for g in ["cyclic:2", "dihedral:3", "octahedral"] {
            let a = analysis(g);
            for l in 1..=4 {
                for n in l..=4 {
                    for m in n..=4 {
                        let lhs = compose(&inclusion(&a, l, n).unwrap(), &inclusion(&a, n, m).unwrap()).unwrap();
                        assert_eq!(lhs, inclusion(&a, l, m).unwrap(), "{g} {l}→{n}→{m}");
                    }
                }
            }
        }
    }

    #[test]
    fn direct_limit_examples() {
        for (g, m) in [("icosahedral", 9), ("cyclic:2", 2), ("dihedral:5", 8), ("tetrahedral", 7), ("cyclic:9", 9)] {
            let a = analysis(g);
            let lim = direct_limit(&a, 4).unwrap();
            assert_eq!(a.m(), m);
            assert_eq!(lim.ranks[&0], m - 1, "{g}");
            assert!((1..7).all(|i| lim.ranks[&(2 * i)] == m), "{g}");
            assert!(mckay_rank_check(&lim, a.classes.len()), "{g}");
            assert_eq!(lim.orbifold_defect, Rational64::from_integer(m as i64 - 2));
        }
    }
}
