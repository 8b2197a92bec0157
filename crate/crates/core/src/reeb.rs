//! Reeb orbits of the perturbed contact form below each action threshold:
//! exact action forms, Conley–Zehnder indices, gradings and parity data.
//!
//! The perturbation parameter ε stays symbolic. An action is `π(c0 + c1·ε)`
//! and every comparison is a statement about leading coefficients, so the
//! "ε sufficiently small" quantifier is discharged exactly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::orbifold::{Orbifold, PointKind};

pub(crate) fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ActionForm {
    /// Level N whose perturbation parameter ε_N the form carries.
    pub level: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub c0: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub c1: Rational64,
}

impl ActionForm {
    pub fn value(&self, eps: f64) -> f64 {
        let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        PI * (f(self.c0) + f(self.c1) * eps)
    }
}

impl fmt::Display for ActionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.c1.numer() == 0 {
            write!(f, "{}π", self.c0)
        } else if self.c1 == -self.c0 {
            write!(f, "{}π(1-ε)", self.c0)
        } else if self.c1 == self.c0 {
            write!(f, "{}π(1+ε)", self.c0)
        } else {
            write!(f, "π({} + {}ε)", self.c0, self.c1)
        }
    }
}

/// `L_N/π`, the action threshold of level N divided by π.
pub fn threshold(spec: GroupSpec, level: u32) -> Rational64 {
    let two_n = Rational64::from_integer(2 * level as i64);
    match spec {
        GroupSpec::Cyclic(n) => two_n - Rational64::new(1, n as i64),
        GroupSpec::BinaryDihedral(n) => two_n - Rational64::new(1, 2 * n as i64),
        _ => two_n - Rational64::new(1, 10),
    }
}

/// Action of the k-th iterate of the exceptional fiber of multiplicity d.
pub fn action(kind: PointKind, d: u64, k: u64, level: u32) -> ActionForm {
    let c0 = Rational64::new(2 * k as i64, d as i64);
    let c1 = match kind {
        PointKind::Min => -c0,
        PointKind::Saddle => Rational64::from_integer(0),
        PointKind::Max => c0,
    };
    ActionForm { level, c0, c1 }
}

/// Conley–Zehnder index of the k-th iterate.
pub fn cz_index(kind: PointKind, d: u64, k: u64) -> i64 {
    let (k, d) = (k as i64, d as i64);
    match kind {
        PointKind::Min => 2 * ((2 * k + d - 1) / d) - 1,
        PointKind::Saddle => k,
        PointKind::Max => 2 * (2 * k / d) + 1,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReebOrbit {
    /// Index into `Orbifold::points`.
    pub base: usize,
    pub base_name: String,
    pub kind: PointKind,
    pub d: u64,
    pub k: u64,
    pub level: u32,
    pub action: ActionForm,
    pub cz: i64,
    pub grading: i64,
    pub negative_hyperbolic: bool,
    pub good: bool,
    pub contractible: bool,
}

impl ReebOrbit {
    pub fn new(base: usize, base_name: &str, kind: PointKind, d: u64, k: u64, level: u32) -> Self {
        let cz = cz_index(kind, d, k);
        let negative_hyperbolic = kind == PointKind::Saddle;
        ReebOrbit {
            base,
            base_name: base_name.to_string(),
            kind,
            d,
            k,
            level,
            action: action(kind, d, k, level),
            cz,
            grading: cz - 1,
            negative_hyperbolic,
            good: !(negative_hyperbolic && k % 2 == 0),
            contractible: k % d == 0,
        }
    }

    pub fn label(&self) -> String {
        if self.k == 1 {
            self.base_name.clone()
        } else {
            format!("{}^{}", self.base_name, self.k)
        }
    }
}

/// All iterates whose ε → 0 action lies strictly below `L_N`.
pub fn enumerate_orbits(orbifold: &Orbifold, spec: GroupSpec, level: u32) -> Result<Vec<ReebOrbit>> {
    if level == 0 {
        return Err(Error::InvalidArgument("level N must be at least 1".into()));
    }
    let l = threshold(spec, level);
    let mut out = Vec::new();
    for (i, p) in orbifold.points.iter().enumerate() {
        for k in 1.. {
            let c0 = Rational64::new(2 * k as i64, p.d as i64);
            if c0 == l {
                return Err(Error::Verification(format!("{}^{k} has action exactly L_{level}", p.name)));
            }
            if c0 > l {
                break;
            }
            out.push(ReebOrbit::new(i, &p.name, p.kind, p.d, k, level));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub total: usize,
    pub good: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DegreeCensus {
    pub counts: BTreeMap<i64, CensusEntry>,
}

impl DegreeCensus {
    pub fn total(&self, grading: i64) -> usize {
        self.counts.get(&grading).map_or(0, |e| e.total)
    }

    pub fn good(&self, grading: i64) -> usize {
        self.counts.get(&grading).map_or(0, |e| e.good)
    }
}

pub fn degree_census(orbits: &[ReebOrbit]) -> DegreeCensus {
    let mut counts: BTreeMap<i64, CensusEntry> = BTreeMap::new();
    for o in orbits {
        let e = counts.entry(o.grading).or_default();
        e.total += 1;
        e.good += o.good as usize;
    }
    DegreeCensus { counts }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConvexityReport {
    pub contractible_checked: usize,
    pub violations: Vec<String>,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Contractible orbits have index at least 3, and the iterate `d·j` over a
/// point of Morse index `ind` has index `4j + ind − 1`.
pub fn dynamical_convexity_check(orbits: &[ReebOrbit]) -> ConvexityReport {
    let mut report = ConvexityReport::default();
    for o in orbits.iter().filter(|o| o.contractible) {
        report.contractible_checked += 1;
        let j = (o.k / o.d) as i64;
        let expected = 4 * j + o.kind.morse_index() as i64 - 1;
        if o.cz < 3 {
            report.violations.push(format!("{} (level {}): CZ {} < 3", o.label(), o.level, o.cz));
        }
        if o.cz != expected {
            report.violations.push(format!("{} (level {}): CZ {} but 4j+ind-1 = {expected}", o.label(), o.level, o.cz));
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalModel {
    pub cz: i64,
    /// Total winding of the tracked vector divided by 2π.
    pub winding: f64,
    pub elliptic: bool,
    pub return_eigenvalues: Option<[f64; 2]>,
}

/// Conley–Zehnder index of the k-th iterate from the linearized flow of the
/// local model `M_t = R(2t/f)·exp(−tε/f² · J₀H)` over one period, where
/// `f = 1 + ε·height` and H is the Hessian normal form of the base point.
pub fn local_model_cz(kind: PointKind, d: u64, k: u64, eps: f64) -> Result<LocalModel> {
    let f = 1.0 + eps * kind.height() as f64;
    let period = 2.0 * PI * k as f64 * f / d as f64;
    let j0 = Matrix2::new(0.0, -1.0, 1.0, 0.0);
    let hess = match kind {
        PointKind::Min => Matrix2::identity(),
        PointKind::Saddle => Matrix2::new(-1.0, 0.0, 0.0, 1.0),
        PointKind::Max => -Matrix2::identity(),
    };
    let gen = j0 * hess * (-eps / (f * f));
    let m = |t: f64| {
        let a = 2.0 * t / f;
        let r = Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos());
        r * (gen * t).exp()
    };
    let m_end = m(period);
    let tr = m_end.trace();
    let elliptic = tr.abs() < 2.0;
    let (v0, eigs) = if elliptic {
        (nalgebra::Vector2::new(1.0, 0.0), None)
    } else {
        let disc = (tr * tr - 4.0 * m_end.determinant()).max(0.0).sqrt();
        let l1 = (tr + tr.signum() * disc) / 2.0;
        let l2 = m_end.determinant() / l1;
        // Eigenvector of l1 from the row of M − l1·I with larger norm.
        let a = m_end - Matrix2::identity() * l1;
        let v = if a.row(0).norm() >= a.row(1).norm() {
            nalgebra::Vector2::new(-a[(0, 1)], a[(0, 0)])
        } else {
            nalgebra::Vector2::new(-a[(1, 1)], a[(1, 0)])
        };
        (v.normalize(), Some([l1.max(l2), l1.min(l2)]))
    };
    let steps = ((period / 1e-3).ceil() as usize).max(4000);
    let mut prev = v0;
    let mut winding = 0.0;
    for s in 1..=steps {
        let cur = m(period * s as f64 / steps as f64) * v0;
        winding += (prev.x * cur.y - prev.y * cur.x).atan2(prev.dot(&cur));
        prev = cur;
    }
    let turns = winding / (2.0 * PI);
    let cz = if elliptic {
        2 * turns.floor() as i64 + 1
    } else {
        let half = winding / PI;
        if (half - half.round()).abs() > 1e-6 {
            return Err(Error::Numeric(format!("eigenvector winding {half}π is not a multiple of π")));
        }
        half.round() as i64
    };
    Ok(LocalModel { cz, winding: turns, elliptic, return_eigenvalues: eigs })
}

/// Rotation number of an elliptic iterate in closed form.
pub fn rotation_number(kind: PointKind, d: u64, k: u64, eps: f64) -> Option<f64> {
    let base = 2.0 * k as f64 / d as f64;
    match kind {
        PointKind::Min => Some(base - k as f64 * eps / (d as f64 * (1.0 - eps))),
        PointKind::Max => Some(base + k as f64 * eps / (d as f64 * (1.0 + eps))),
        PointKind::Saddle => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(threshold(GroupSpec::Cyclic(4), 1), Rational64::new(7, 4));
        assert_eq!(threshold(GroupSpec::BinaryDihedral(3), 2), Rational64::new(23, 6));
        assert_eq!(threshold(GroupSpec::BinaryIcosahedral, 1), Rational64::new(19, 10));
    }

    #[test]
    fn action_examples() {
        let a = action(PointKind::Min, 4, 3, 1);
        assert_eq!((a.c0, a.c1), (Rational64::new(3, 2), Rational64::new(-3, 2)));
        let a = action(PointKind::Saddle, 4, 5, 1);
        assert_eq!((a.c0, a.c1), (Rational64::new(5, 2), Rational64::from_integer(0)));
        let a = action(PointKind::Min, 10, 7, 1);
        assert_eq!(a.c0, Rational64::new(7, 5));
        assert_eq!(a.to_string(), "7/5π(1-ε)");
    }

    #[test]
    fn cz_examples() {
        assert_eq!(cz_index(PointKind::Min, 4, 3), 3);
        assert_eq!(cz_index(PointKind::Saddle, 4, 7), 7);
        assert_eq!(cz_index(PointKind::Min, 10, 7), 3);
    }

    #[test]
    fn saddle_return_map() {
        let eps = 1e-4;
        let lm = local_model_cz(PointKind::Saddle, 4, 4, eps).unwrap();
        assert_eq!(lm.cz, 4);
        let [a, b] = lm.return_eigenvalues.unwrap();
        let x = 2.0 * PI * eps;
        assert!((a - (x.cosh() + x.sinh())).abs() < 1e-12);
        assert!((b - (x.cosh() - x.sinh())).abs() < 1e-12);
        let odd = local_model_cz(PointKind::Saddle, 4, 3, eps).unwrap();
        assert!(odd.return_eigenvalues.unwrap()[0] < 0.0);
        assert_eq!(odd.cz, 3);
    }

    #[test]
    fn elliptic_rotation_numbers() {
        let eps = 1e-4;
        for n in [3u64, 5] {
            for k in 1..=3 * n {
                let lm = local_model_cz(PointKind::Max, 2 * n, k, eps).unwrap();
                let theta = k as f64 / n as f64 + eps * k as f64 / (2.0 * n as f64 * (1.0 + eps));
                assert!((lm.winding - theta).abs() < 1e-9);
                assert_eq!(lm.cz, 2 * (k / n) as i64 + 1);
            }
        }
    }
}
