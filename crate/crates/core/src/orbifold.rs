//! Fixed points of H = P(G) on S², their orbits and isotropy, and the
//! orbifold points of S²/H typed by the Morse index of an invariant function
//! whose critical set is the fixed-point set.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{Family, FiniteSubgroup, GroupElement, RotationGroup};

pub const AXIS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Min,
    Saddle,
    Max,
}

impl PointKind {
    pub fn morse_index(self) -> u8 {
        match self {
            PointKind::Min => 0,
            PointKind::Saddle => 1,
            PointKind::Max => 2,
        }
    }

    /// Value of the invariant Morse function in the local normal form.
    pub fn height(self) -> i64 {
        self.morse_index() as i64 - 1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    pub direction: [f64; 3],
    pub stabilizer_order: usize,
    pub orbit_id: usize,
    pub morse_index: u8,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbifoldPoint {
    pub kind: PointKind,
    /// Family-specific name: `s`/`n` (cyclic), `e-`/`h`/`e+` (dihedral),
    /// `V`/`E`/`F` (polyhedral).
    pub name: String,
    pub isotropy: usize,
    pub morse_index: u8,
    /// Multiplicity of the exceptional fiber, equal to the order of its
    /// class in the fundamental group.
    pub d: u64,
    pub orbit_size: usize,
    /// Lexicographically greatest point of the orbit.
    pub representative: [f64; 3],
    pub orbit_id: usize,
}

#[derive(Clone, Debug)]
pub struct Orbifold {
    pub fixed: Vec<FixedPoint>,
    /// Ordered min, saddle (if any), max.
    pub points: Vec<OrbifoldPoint>,
}

impl Orbifold {
    pub fn build(g: &FiniteSubgroup, h: &RotationGroup) -> Result<Orbifold> {
        let fixed = fixed_points(g, h)?;
        let points = classify_morse(g, &fixed);
        Ok(Orbifold { fixed, points })
    }

    pub fn point(&self, kind: PointKind) -> Option<&OrbifoldPoint> {
        self.points.iter().find(|p| p.kind == kind)
    }
}

fn v3(p: [f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn lex_cmp(a: &[f64; 3], b: &[f64; 3]) -> std::cmp::Ordering {
    for i in 0..3 {
        if (a[i] - b[i]).abs() > AXIS_TOL {
            return a[i].partial_cmp(&b[i]).unwrap();
        }
    }
    std::cmp::Ordering::Equal
}

/// Unit axis of a non-identity rotation, from the cross product of the two
/// rows of `R − I` spanning the largest area.
fn axis(r: &nalgebra::Matrix3<f64>) -> Vector3<f64> {
    let m = r - nalgebra::Matrix3::identity();
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    let mut best = Vector3::zeros();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = rows[i].cross(&rows[j]);
        if c.norm() > best.norm() {
            best = c;
        }
    }
    best.normalize()
}

fn stabilizer(h: &RotationGroup, p: &Vector3<f64>) -> Vec<usize> {
    (0..h.order()).filter(|&i| (h.rotations[i].numeric * p - p).norm() < AXIS_TOL).collect()
}

/// Points of S² with nontrivial stabilizer, partitioned into H-orbits. For a
/// cyclic group the poles are returned even when H is trivial, since they
/// carry the exceptional fibers.
pub fn fixed_points(g: &FiniteSubgroup, h: &RotationGroup) -> Result<Vec<FixedPoint>> {
    let mut dirs: Vec<Vector3<f64>> = Vec::new();
    let push = |dirs: &mut Vec<Vector3<f64>>, v: Vector3<f64>| {
        if !dirs.iter().any(|d| (d - v).norm() < AXIS_TOL) {
            dirs.push(v);
        }
    };
    if g.spec.family() == Family::Cyclic {
        push(&mut dirs, Vector3::new(-1.0, 0.0, 0.0));
        push(&mut dirs, Vector3::new(1.0, 0.0, 0.0));
    } else {
        for r in &h.rotations {
            if (r.numeric - nalgebra::Matrix3::identity()).norm() < AXIS_TOL {
                continue;
            }
            let a = axis(&r.numeric);
            push(&mut dirs, a);
            push(&mut dirs, -a);
        }
    }
    let mut orbit_of = vec![usize::MAX; dirs.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..dirs.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        for r in &h.rotations {
            let img = r.numeric * dirs[i];
            let j = dirs
                .iter()
                .position(|d| (d - img).norm() < AXIS_TOL)
                .ok_or_else(|| Error::Geometry("fixed-point set not H-invariant".into()))?;
            if orbit_of[j] == usize::MAX {
                orbit_of[j] = id;
                members.push(j);
            }
        }
        orbits.push(members);
    }
    let mut out: Vec<FixedPoint> = dirs
        .iter()
        .enumerate()
        .map(|(i, d)| FixedPoint {
            direction: [d.x, d.y, d.z],
            stabilizer_order: stabilizer(h, d).len(),
            orbit_id: orbit_of[i],
            morse_index: 0,
        })
        .collect();
    for (id, members) in orbits.iter().enumerate() {
        let iso = out[members[0]].stabilizer_order;
        if members.iter().any(|&m| out[m].stabilizer_order != iso) || members.len() * iso != h.order() {
            return Err(Error::Geometry(format!(
                "orbit {id}: size {} times isotropy {iso} differs from |H| = {}",
                members.len(),
                h.order()
            )));
        }
    }
    let kinds = orbit_kinds(g, h, &out, orbits.len())?;
    for fp in out.iter_mut() {
        fp.morse_index = kinds[fp.orbit_id].morse_index();
    }
    Ok(out)
}

fn orbit_containing(fixed: &[FixedPoint], p: &Vector3<f64>) -> Option<usize> {
    fixed.iter().find(|f| (v3(f.direction) - p).norm() < AXIS_TOL).map(|f| f.orbit_id)
}

/// Morse type of each orbit: the minima, saddles and maxima of the invariant
/// function.
fn orbit_kinds(
    g: &FiniteSubgroup,
    h: &RotationGroup,
    fixed: &[FixedPoint],
    n_orbits: usize,
) -> Result<Vec<PointKind>> {
    let mut kinds: Vec<Option<PointKind>> = vec![None; n_orbits];
    let missing = |what: &str| Error::Geometry(format!("no fixed-point orbit for {what}"));
    match g.spec.family() {
        Family::Cyclic => {
            kinds[orbit_containing(fixed, &Vector3::new(-1.0, 0.0, 0.0)).ok_or_else(|| missing("south pole"))?] =
                Some(PointKind::Min);
            kinds[orbit_containing(fixed, &Vector3::new(1.0, 0.0, 0.0)).ok_or_else(|| missing("north pole"))?] =
                Some(PointKind::Max);
        }
        Family::Dihedral => {
            let n = match g.spec {
                crate::groups::GroupSpec::BinaryDihedral(n) => n,
                _ => unreachable!(),
            };
            // p₊ = (1,0,0) is fixed by P(A), p_h = (0,1,0) by P(B), and
            // p₋ = (0, cos π/n, sin π/n) by P(AB).
            let t = std::f64::consts::PI / n as f64;
            let marks = [
                (1, 0, Vector3::new(1.0, 0.0, 0.0), PointKind::Max),
                (0, 1, Vector3::new(0.0, 1.0, 0.0), PointKind::Saddle),
                (1, 1, Vector3::new(0.0, t.cos(), t.sin()), PointKind::Min),
            ];
            for (k, l, p, kind) in marks {
                let e = g.find(&GroupElement::Dihedral { k, l, n }).ok_or_else(|| missing("generator"))?;
                let r = &h.rotations[h.of_element[e]].numeric;
                if (r * p - p).norm() > AXIS_TOL {
                    return Err(Error::Geometry(format!("{kind:?} mark not fixed by its generator")));
                }
                let id = orbit_containing(fixed, &p).ok_or_else(|| missing("generator axis"))?;
                if kinds[id].is_some() {
                    return Err(Error::Geometry("dihedral marks share an orbit".into()));
                }
                kinds[id] = Some(kind);
            }
        }
        Family::Polyhedral => {
            let iso = |id: usize| fixed.iter().find(|f| f.orbit_id == id).unwrap().stabilizer_order;
            let mut ids: Vec<usize> = (0..n_orbits).collect();
            // Largest isotropy first; ties broken by the lexicographically
            // smallest member, which marks the vertex orbit.
            let smallest = |id: usize| {
                fixed.iter().filter(|f| f.orbit_id == id).map(|f| f.direction).min_by(lex_cmp).unwrap()
            };
            ids.sort_by(|&a, &b| iso(b).cmp(&iso(a)).then_with(|| lex_cmp(&smallest(a), &smallest(b))));
            if ids.len() != 3 {
                return Err(Error::Geometry(format!("{} fixed-point orbits, expected 3", ids.len())));
            }
            let edge = ids.iter().position(|&id| iso(id) == 2).ok_or_else(|| missing("edges"))?;
            let edge_id = ids.remove(edge);
            kinds[edge_id] = Some(PointKind::Saddle);
            kinds[ids[0]] = Some(PointKind::Min);
            kinds[ids[1]] = Some(PointKind::Max);
        }
    }
    kinds
        .into_iter()
        .map(|k| k.ok_or_else(|| Error::Geometry("unclassified fixed-point orbit".into())))
        .collect()
}

/// One orbifold point per fixed-point orbit, ordered min, saddle, max.
pub fn classify_morse(g: &FiniteSubgroup, fixed: &[FixedPoint]) -> Vec<OrbifoldPoint> {
    let n_orbits = fixed.iter().map(|f| f.orbit_id + 1).max().unwrap_or(0);
    let mut points: Vec<OrbifoldPoint> = (0..n_orbits)
        .map(|id| {
            let members: Vec<&FixedPoint> = fixed.iter().filter(|f| f.orbit_id == id).collect();
            let kind = match members[0].morse_index {
                0 => PointKind::Min,
                1 => PointKind::Saddle,
                _ => PointKind::Max,
            };
            let isotropy = members[0].stabilizer_order;
            let representative = members.iter().map(|f| f.direction).max_by(lex_cmp).unwrap();
            OrbifoldPoint {
                kind,
                name: point_name(g.spec.family(), kind).into(),
                isotropy,
                morse_index: kind.morse_index(),
                d: embedded_multiplicity(isotropy, g),
                orbit_size: members.len(),
                representative,
                orbit_id: id,
            }
        })
        .collect();
    points.sort_by_key(|p| p.kind);
    points
}

fn point_name(family: Family, kind: PointKind) -> &'static str {
    match (family, kind) {
        (Family::Cyclic, PointKind::Min) => "s",
        (Family::Cyclic, _) => "n",
        (Family::Dihedral, PointKind::Min) => "e-",
        (Family::Dihedral, PointKind::Saddle) => "h",
        (Family::Dihedral, PointKind::Max) => "e+",
        (Family::Polyhedral, PointKind::Min) => "V",
        (Family::Polyhedral, PointKind::Saddle) => "E",
        (Family::Polyhedral, PointKind::Max) => "F",
    }
}

/// Covering multiplicity of the exceptional fiber over a point with the
/// given isotropy.
pub fn embedded_multiplicity(isotropy: usize, g: &FiniteSubgroup) -> u64 {
    if g.order() % 2 == 0 {
        2 * isotropy as u64
    } else {
        isotropy as u64
    }
}
