//! Numerical H-invariant Morse–Smale function on S² whose critical set is
//! the fixed-point set of H, with its gradient flow census and the orbifold
//! Morse homology of S²/H.
//!
//! Everything here is floating point and tolerance based. Nothing in the
//! exact homology pipeline reads from this module.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::RotationGroup;
use crate::homology::rank;
use crate::orbifold::Orbifold;

/// σ as multiples of the minimal separation of the fixed-point set, in the
/// order they are tried.
pub const SIGMA_FACTORS: [f64; 4] = [0.6, 0.45, 0.8, 1.0];

const NEWTON_ITERS: usize = 60;
const NEWTON_MAX_STEP: f64 = 0.05;
const DEDUP_TOL: f64 = 1e-7;
const FLOW_START: f64 = 1e-3;
const FLOW_MAX_STEPS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MorseTolerances {
    /// Newton stops once the tangent gradient is below this.
    pub gradient: f64,
    /// Hessian eigenvalues must exceed this in absolute value.
    pub nondegeneracy: f64,
    /// Critical points and fixed points are matched within this distance.
    pub matching: f64,
    /// Spread allowed among the index-1 critical values.
    pub saddle_level: f64,
    pub invariance: f64,
    /// Local error bound per integration step.
    pub flow_step: f64,
    /// Flow lines stop this close to a critical point.
    pub arrival: f64,
}

impl Default for MorseTolerances {
    fn default() -> Self {
        MorseTolerances {
            gradient: 1e-10,
            nondegeneracy: 1e-8,
            matching: 1e-6,
            saddle_level: 1e-9,
            invariance: 1e-12,
            flow_step: 1e-10,
            arrival: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MorseConfig {
    pub grid_lat: usize,
    pub grid_lon: usize,
    /// Fixed σ; `None` searches over [`SIGMA_FACTORS`].
    pub sigma: Option<f64>,
    pub invariance_samples: usize,
    pub seed: u64,
    pub tol: MorseTolerances,
}

impl Default for MorseConfig {
    fn default() -> Self {
        MorseConfig {
            grid_lat: 1000,
            grid_lon: 1000,
            sigma: None,
            invariance_samples: 10_000,
            seed: 0,
            tol: MorseTolerances::default(),
        }
    }
}

/// `f(p) = Σ_{q∈X₂} exp(−‖p−q‖²/σ²) − Σ_{q∈X₀} exp(−‖p−q‖²/σ²)`.
#[derive(Clone, Debug, Serialize)]
pub struct SphereFunction {
    pub sigma: f64,
    pub maxima: Vec<[f64; 3]>,
    pub minima: Vec<[f64; 3]>,
}

fn v3(p: [f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

/// Orthonormal basis of the tangent plane at a unit vector.
pub fn tangent_frame(p: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let e = if p.x.abs() <= p.y.abs() && p.x.abs() <= p.z.abs() {
        Vector3::x()
    } else if p.y.abs() <= p.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let b1 = (e - p * e.dot(p)).normalize();
    (b1, p.cross(&b1))
}

impl SphereFunction {
    fn bumps(&self) -> impl Iterator<Item = (f64, Vector3<f64>)> + '_ {
        self.maxima.iter().map(|q| (1.0, v3(*q))).chain(self.minima.iter().map(|q| (-1.0, v3(*q))))
    }

    pub fn value(&self, p: &Vector3<f64>) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.bumps().map(|(s, q)| s * (-(p - q).norm_squared() / s2).exp()).sum()
    }

    /// Ambient gradient in ℝ³.
    pub fn gradient(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let s2 = self.sigma * self.sigma;
        self.bumps()
            .map(|(s, q)| {
                let d = p - q;
                d * (-2.0 * s * (-d.norm_squared() / s2).exp() / s2)
            })
            .sum()
    }

    /// Ambient Hessian in ℝ³.
    pub fn hessian(&self, p: &Vector3<f64>) -> Matrix3<f64> {
        let s2 = self.sigma * self.sigma;
        self.bumps()
            .map(|(s, q)| {
                let d = p - q;
                let e = s * (-d.norm_squared() / s2).exp();
                (d * d.transpose() * (4.0 / (s2 * s2)) - Matrix3::identity() * (2.0 / s2)) * e
            })
            .sum()
    }

    pub fn tangent_gradient(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let g = self.gradient(p);
        g - p * p.dot(&g)
    }

    /// Riemannian Hessian `Bᵀ∇²f B − (p·∇f) I` in the frame of [`tangent_frame`].
    pub fn riemannian_hessian(&self, p: &Vector3<f64>) -> Matrix2<f64> {
        let (b1, b2) = tangent_frame(p);
        let h = self.hessian(p);
        let radial = p.dot(&self.gradient(p));
        let b = [b1, b2];
        Matrix2::from_fn(|i, j| b[i].dot(&(h * b[j]))) - Matrix2::identity() * radial
    }
}

/// The bump function with maxima at index-2 fixed points and minima at
/// index-0 fixed points.
pub fn build_invariant_morse(orbifold: &Orbifold, sigma: f64) -> Result<SphereFunction> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("σ = {sigma} must be positive")));
    }
    let pick = |idx: u8| orbifold.fixed.iter().filter(|f| f.morse_index == idx).map(|f| f.direction).collect();
    Ok(SphereFunction { sigma, maxima: pick(2), minima: pick(0) })
}

/// Smallest distance between two fixed points.
pub fn min_separation(orbifold: &Orbifold) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in orbifold.fixed.iter().enumerate() {
        for b in &orbifold.fixed[i + 1..] {
            best = best.min((v3(a.direction) - v3(b.direction)).norm());
        }
    }
    best
}

/// Largest `|f(h·p) − f(p)|` over random rotations of H and random points.
pub fn invariance_residual(f: &SphereFunction, h: &RotationGroup, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let r = &h.rotations[rng.gen_range(0..h.order())].numeric;
        let p = loop {
            let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                break v / n;
            }
        };
        worst = worst.max((f.value(&(r * p)) - f.value(&p)).abs());
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub point: [f64; 3],
    pub index: u8,
    pub value: f64,
    pub hessian_eigenvalues: [f64; 2],
}

fn newton(f: &SphereFunction, start: Vector3<f64>, tol: f64) -> Option<Vector3<f64>> {
    let mut p = start.normalize();
    for _ in 0..NEWTON_ITERS {
        let (b1, b2) = tangent_frame(&p);
        let g = f.gradient(&p);
        let gt = Vector2::new(b1.dot(&g), b2.dot(&g));
        if gt.norm() < tol {
            return Some(p);
        }
        let step = f.riemannian_hessian(&p).lu().solve(&(-gt))?;
        let scale = (NEWTON_MAX_STEP / step.norm()).min(1.0);
        p = (p + (b1 * step.x + b2 * step.y) * scale).normalize();
    }
    let (b1, b2) = tangent_frame(&p);
    let g = f.gradient(&p);
    (Vector2::new(b1.dot(&g), b2.dot(&g)).norm() < tol).then_some(p)
}

fn classify(f: &SphereFunction, p: Vector3<f64>, tol: f64) -> Result<CriticalPoint> {
    let eig = f.riemannian_hessian(&p).symmetric_eigen().eigenvalues;
    let mut e = [eig.x, eig.y];
    e.sort_by(f64::total_cmp);
    if e.iter().any(|x| x.abs() <= tol) {
        return Err(Error::Numeric(format!("degenerate critical point at {:?} (eigenvalues {e:?})", p.as_slice())));
    }
    Ok(CriticalPoint {
        point: [p.x, p.y, p.z],
        index: e.iter().filter(|x| **x < 0.0).count() as u8,
        value: f.value(&p),
        hessian_eigenvalues: e,
    })
}

/// Grid screening of `|grad f|²` for local minima, then Newton polishing.
pub fn find_critical_points(f: &SphereFunction, cfg: &MorseConfig) -> Result<Vec<CriticalPoint>> {
    let (nl, nm) = (cfg.grid_lat, cfg.grid_lon);
    if nl < 3 || nm < 3 {
        return Err(Error::InvalidArgument(format!("grid {nl}×{nm} too coarse")));
    }
    let point = |i: usize, j: usize| {
        let theta = (i as f64 + 0.5) * std::f64::consts::PI / nl as f64;
        let phi = j as f64 * std::f64::consts::TAU / nm as f64;
        Vector3::new(theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin())
    };
    let grad2: Vec<f64> =
        (0..nl * nm).into_par_iter().map(|k| f.tangent_gradient(&point(k / nm, k % nm)).norm_squared()).collect();
    let mut seeds = vec![Vector3::x(), -Vector3::x()];
    for i in 0..nl {
        for j in 0..nm {
            let here = grad2[i * nm + j];
            let mut is_min = true;
            'nbr: for di in [-1i64, 0, 1] {
                let ii = i as i64 + di;
                if ii < 0 || ii >= nl as i64 {
                    continue;
                }
                for dj in [-1i64, 0, 1] {
                    if (di, dj) == (0, 0) {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(nm as i64) as usize;
                    if grad2[ii as usize * nm + jj] < here {
                        is_min = false;
                        break 'nbr;
                    }
                }
            }
            if is_min {
                seeds.push(point(i, j));
            }
        }
    }
    let mut found: Vec<Vector3<f64>> = Vec::new();
    for s in seeds {
        if let Some(p) = newton(f, s, cfg.tol.gradient) {
            if !found.iter().any(|q| (q - p).norm() < DEDUP_TOL) {
                found.push(p);
            }
        }
    }
    found.sort_by(|a, b| a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    found.into_iter().map(|p| classify(f, p, cfg.tol.nondegeneracy)).collect()
}

/// Bijection between critical points and fixed points within
/// `tol`, preserving Morse index. Returns the index counts.
pub fn verify_critical_set(crit: &[CriticalPoint], orbifold: &Orbifold, tol: f64) -> Result<[usize; 3]> {
    let mut used = vec![false; orbifold.fixed.len()];
    let mut spurious = Vec::new();
    for c in crit {
        let hit = orbifold
            .fixed
            .iter()
            .position(|fp| (v3(fp.direction) - v3(c.point)).norm() < tol && fp.morse_index == c.index);
        match hit {
            Some(i) if !used[i] => used[i] = true,
            _ => spurious.push(format!("{:?} (index {})", c.point, c.index)),
        }
    }
    let missing: Vec<String> =
        orbifold.fixed.iter().zip(&used).filter(|(_, u)| !**u).map(|(fp, _)| format!("{:?}", fp.direction)).collect();
    if !spurious.is_empty() || !missing.is_empty() {
        return Err(Error::Verification(format!(
            "critical set differs from Fix(H): spurious [{}], missing [{}]",
            spurious.join(", "),
            missing.join(", ")
        )));
    }
    let mut counts = [0; 3];
    for c in crit {
        counts[c.index as usize] += 1;
    }
    Ok(counts)
}

// Dormand–Prince 5(4) tableau; the field is autonomous so the nodes are unused.
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One adaptive step of an autonomous field; returns the 5th-order
/// solution and the embedded error estimate.
fn dp_step(field: &dyn Fn(&Vector3<f64>) -> Vector3<f64>, y: &Vector3<f64>, h: f64) -> (Vector3<f64>, f64) {
    let mut k = [Vector3::zeros(); 7];
    for s in 0..7 {
        let yi = y + (0..s).map(|j| k[j] * (DP_A[s][j] * h)).sum::<Vector3<f64>>();
        k[s] = field(&yi);
    }
    let y5 = y + (0..7).map(|j| k[j] * (DP_B5[j] * h)).sum::<Vector3<f64>>();
    let y4 = y + (0..7).map(|j| k[j] * (DP_B4[j] * h)).sum::<Vector3<f64>>();
    (y5, (y5 - y4).norm())
}

/// Arc-length parametrised gradient line from `start`, ascending when
/// `sign = 1` and descending when `sign = −1`, run until it enters the
/// arrival ball of a critical point other than `origin`.
fn follow(
    f: &SphereFunction,
    crit: &[CriticalPoint],
    origin: usize,
    start: Vector3<f64>,
    sign: f64,
    tol: &MorseTolerances,
) -> Result<usize> {
    let field = |p: &Vector3<f64>| {
        let q = p.normalize();
        let g = f.tangent_gradient(&q);
        let n = g.norm();
        if n == 0.0 {
            Vector3::zeros()
        } else {
            g * (sign / n)
        }
    };
    let targets: Vec<(usize, Vector3<f64>)> =
        crit.iter().enumerate().filter(|(i, _)| *i != origin).map(|(i, c)| (i, v3(c.point))).collect();
    let mut p = start;
    let mut h: f64 = 1e-3;
    for _ in 0..FLOW_MAX_STEPS {
        let (near, dist) = targets
            .iter()
            .map(|(i, q)| (*i, (p - q).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("a flow needs somewhere to go");
        if dist < tol.arrival {
            return Ok(near);
        }
        h = h.min(0.5 * dist);
        let (next, err) = dp_step(&field, &p, h);
        if err <= tol.flow_step {
            p = next.normalize();
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (tol.flow_step / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(Error::Numeric(format!("gradient line from critical point {origin} did not converge in {FLOW_MAX_STEPS} steps")))
}

#[derive(Clone, Debug, Serialize)]
pub struct SaddleConnections {
    pub saddle: usize,
    /// Endpoints (indices into the critical point list) of the two
    /// descending lines.
    pub descending: [usize; 2],
    pub ascending: [usize; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowCensus {
    pub connections: Vec<SaddleConnections>,
    /// Number of lines ending at a minimum, resp. maximum.
    pub saddle_to_min: usize,
    pub saddle_to_max: usize,
    pub saddle_to_saddle: usize,
}

pub fn flow_lines(f: &SphereFunction, crit: &[CriticalPoint], tol: &MorseTolerances) -> Result<FlowCensus> {
    let mut connections = Vec::new();
    let (mut to_min, mut to_max, mut to_saddle) = (0, 0, 0);
    for (s, c) in crit.iter().enumerate().filter(|(_, c)| c.index == 1) {
        let p = v3(c.point);
        let (b1, b2) = tangent_frame(&p);
        let eig = f.riemannian_hessian(&p).symmetric_eigen();
        let dir = |col: usize| (b1 * eig.eigenvectors[(0, col)] + b2 * eig.eigenvectors[(1, col)]).normalize();
        let (neg, pos) = if eig.eigenvalues[0] < eig.eigenvalues[1] { (dir(0), dir(1)) } else { (dir(1), dir(0)) };
        let mut run = |v: Vector3<f64>, sign: f64| -> Result<[usize; 2]> {
            let mut ends = [0; 2];
            for (slot, side) in ends.iter_mut().zip([1.0, -1.0]) {
                let end = follow(f, crit, s, (p + v * (side * FLOW_START)).normalize(), sign, tol)?;
                match crit[end].index {
                    0 => to_min += 1,
                    2 => to_max += 1,
                    _ => to_saddle += 1,
                }
                *slot = end;
            }
            Ok(ends)
        };
        let descending = run(neg, -1.0)?;
        let ascending = run(pos, 1.0)?;
        connections.push(SaddleConnections { saddle: s, descending, ascending });
    }
    Ok(FlowCensus { connections, saddle_to_min: to_min, saddle_to_max: to_max, saddle_to_saddle: to_saddle })
}

#[derive(Clone, Debug, Serialize)]
pub struct SmaleReport {
    /// Spread of f over the index-1 points.
    pub saddle_level_spread: f64,
    pub saddle_to_saddle: usize,
    pub passed: bool,
}

pub fn verify_smale(crit: &[CriticalPoint], census: &FlowCensus, tol: f64) -> SmaleReport {
    let levels: Vec<f64> = crit.iter().filter(|c| c.index == 1).map(|c| c.value).collect();
    let spread = match (levels.iter().copied().reduce(f64::min), levels.iter().copied().reduce(f64::max)) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    };
    SmaleReport {
        saddle_level_spread: spread,
        saddle_to_saddle: census.saddle_to_saddle,
        passed: spread < tol && census.saddle_to_saddle == 0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientCritical {
    pub name: String,
    pub index: u8,
    pub isotropy: usize,
    pub orientable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbifoldMorseComplex {
    pub points: Vec<QuotientCritical>,
    /// `(source, target, coefficient)` between orientable generators.
    pub differential: Vec<(usize, usize, String)>,
    pub ranks: [usize; 3],
}

/// Quotient critical points with orientability, the isotropy-weighted
/// differential between orientable generators, and ranks over ℚ.
pub fn orbifold_morse_homology(
    f: &SphereFunction,
    orbifold: &Orbifold,
    h: &RotationGroup,
    crit: &[CriticalPoint],
    census: &FlowCensus,
    tol: f64,
) -> Result<OrbifoldMorseComplex> {
    let mut points = Vec::new();
    let mut rep_of = Vec::new();
    for op in &orbifold.points {
        let p = v3(op.representative);
        let ci = crit
            .iter()
            .position(|c| (v3(c.point) - p).norm() < tol)
            .ok_or_else(|| Error::Verification(format!("no critical point over {}", op.name)))?;
        let orientable = if op.morse_index == 1 {
            let (b1, b2) = tangent_frame(&p);
            let eig = f.riemannian_hessian(&p).symmetric_eigen();
            let col = if eig.eigenvalues[0] < eig.eigenvalues[1] { 0 } else { 1 };
            let u = b1 * eig.eigenvectors[(0, col)] + b2 * eig.eigenvectors[(1, col)];
            !h.rotations.iter().any(|r| (r.numeric * p - p).norm() < tol && (r.numeric * u + u).norm() < tol)
        } else {
            true
        };
        if op.morse_index == 1 && orientable {
            return Err(Error::Unsupported(format!(
                "orientable saddle {} would need orientation signs on the orbifold differential",
                op.name
            )));
        }
        points.push(QuotientCritical { name: op.name.clone(), index: op.morse_index, isotropy: op.isotropy, orientable });
        rep_of.push(ci);
    }
    // Entries run from orientable index-k to orientable index-(k−1) points;
    // every line in the census starts at a saddle, so only saddle sources
    // could contribute.
    let mut differential = Vec::new();
    for (qi, q) in points.iter().enumerate() {
        if !(q.orientable && q.index == 1) {
            continue;
        }
        let conn = census.connections.iter().find(|c| c.saddle == rep_of[qi]);
        for (ti, _) in points.iter().enumerate().filter(|(_, t)| t.orientable && t.index == 0) {
            let hits = conn.map_or(0, |c| c.descending.iter().filter(|&&e| same_orbit(h, crit, e, rep_of[ti], tol)).count());
            if hits > 0 {
                let w = Rational64::new(hits as i64 * q.isotropy as i64, 1);
                differential.push((qi, ti, w.to_string()));
            }
        }
    }
    let mut ranks = [0usize; 3];
    for deg in 0..3u8 {
        let dim = points.iter().filter(|p| p.orientable && p.index == deg).count();
        let out = boundary_rank(&points, &differential, deg);
        let inc = if deg < 2 { boundary_rank(&points, &differential, deg + 1) } else { 0 };
        ranks[deg as usize] = dim - out - inc;
    }
    Ok(OrbifoldMorseComplex { points, differential, ranks })
}

fn same_orbit(h: &RotationGroup, crit: &[CriticalPoint], a: usize, b: usize, tol: f64) -> bool {
    let (pa, pb) = (v3(crit[a].point), v3(crit[b].point));
    h.rotations.iter().any(|r| (r.numeric * pa - pb).norm() < tol)
}

fn boundary_rank(points: &[QuotientCritical], diff: &[(usize, usize, String)], deg: u8) -> usize {
    if deg == 0 {
        return 0;
    }
    let rows: Vec<usize> = (0..points.len()).filter(|&i| points[i].orientable && points[i].index == deg - 1).collect();
    let cols: Vec<usize> = (0..points.len()).filter(|&i| points[i].orientable && points[i].index == deg).collect();
    let mut m = vec![vec![Rational64::from_integer(0); cols.len()]; rows.len()];
    for (s, t, w) in diff {
        if let (Some(c), Some(r)) = (cols.iter().position(|x| x == s), rows.iter().position(|x| x == t)) {
            m[r][c] += w.parse::<Rational64>().unwrap_or_default();
        }
    }
    rank(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct MorseReport {
    pub sigma: f64,
    /// σ values rejected before the accepted one, with the reason.
    pub rejected: Vec<(f64, String)>,
    pub invariance_residual: f64,
    pub critical_points: Vec<CriticalPoint>,
    pub index_counts: [usize; 3],
    pub smale: SmaleReport,
    pub census: FlowCensus,
    pub complex: OrbifoldMorseComplex,
    pub invariance_passed: bool,
}

impl MorseReport {
    pub fn passed(&self) -> bool {
        self.invariance_passed && self.smale.passed && self.complex.ranks == [1, 0, 1]
    }
}

/// Builds f, checks invariance, locates and verifies the critical set (with
/// σ retries), then runs the flow census and the orbifold Morse homology.
pub fn run_morse_lab(orbifold: &Orbifold, h: &RotationGroup, cfg: &MorseConfig) -> Result<MorseReport> {
    let sep = min_separation(orbifold);
    let sigmas: Vec<f64> = match cfg.sigma {
        Some(s) => vec![s],
        None => SIGMA_FACTORS.iter().map(|k| k * sep).collect(),
    };
    let mut rejected = Vec::new();
    for sigma in sigmas {
        let f = build_invariant_morse(orbifold, sigma)?;
        let crit = match find_critical_points(&f, cfg) {
            Ok(c) => c,
            Err(e @ Error::Numeric(_)) => {
                rejected.push((sigma, e.to_string()));
                continue;
            }
            Err(e) => return Err(e),
        };
        let counts = match verify_critical_set(&crit, orbifold, cfg.tol.matching) {
            Ok(c) => c,
            Err(e) => {
                rejected.push((sigma, e.to_string()));
                continue;
            }
        };
        let invariance = invariance_residual(&f, h, cfg.invariance_samples, cfg.seed);
        let census = flow_lines(&f, &crit, &cfg.tol)?;
        let smale = verify_smale(&crit, &census, cfg.tol.saddle_level);
        let complex = orbifold_morse_homology(&f, orbifold, h, &crit, &census, cfg.tol.matching)?;
        if complex.ranks != [1, 0, 1] {
            return Err(Error::Verification(format!("orbifold Morse ranks {:?}", complex.ranks)));
        }
        return Ok(MorseReport {
            sigma,
            rejected,
            invariance_residual: invariance,
            critical_points: crit,
            index_counts: counts,
            smale,
            census,
            complex,
            invariance_passed: invariance < cfg.tol.invariance,
        });
    }
    Err(Error::Verification(format!(
        "no σ produced Crit(f) = Fix(H): {}",
        rejected.iter().map(|(s, e)| format!("σ={s:.4}: {e}")).collect::<Vec<_>>().join("; ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupSpec;
    use crate::Analysis;

    fn quick() -> MorseConfig {
        MorseConfig { grid_lat: 200, grid_lon: 200, invariance_samples: 500, ..MorseConfig::default() }
    }

    fn analysis(s: &str) -> Analysis {
        Analysis::new(s.parse::<GroupSpec>().unwrap()).unwrap()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let a = analysis("dihedral:3");
        let f = build_invariant_morse(&a.orbifold, 0.5).unwrap();
        let p = Vector3::new(0.3, -0.5, 0.8).normalize();
        let h = 1e-6;
        for i in 0..3 {
            let e = Vector3::ith(i, h);
            let fd = (f.value(&(p + e)) - f.value(&(p - e))) / (2.0 * h);
            assert!((fd - f.gradient(&p)[i]).abs() < 1e-7);
            let gd = (f.gradient(&(p + e)) - f.gradient(&(p - e))) / (2.0 * h);
            assert!((gd - f.hessian(&p).column(i)).norm() < 1e-6);
        }
    }

    #[test]
    fn cyclic_has_only_the_poles() {
        let a = analysis("cyclic:5");
        let r = run_morse_lab(&a.orbifold, &a.rotations, &quick()).unwrap();
        assert_eq!(r.index_counts, [1, 0, 1]);
        assert_eq!(r.critical_points.len(), 2);
        assert!(r.passed());
    }

    #[test]
    fn dihedral_three_flow_census() {
        let a = analysis("dihedral:3");
        let r = run_morse_lab(&a.orbifold, &a.rotations, &quick()).unwrap();
        assert_eq!(r.index_counts, [3, 3, 2]);
        assert_eq!(r.census.connections.len(), 3);
        for c in &r.census.connections {
            assert_ne!(c.descending[0], c.descending[1]);
            assert!(c.descending.iter().all(|&e| r.critical_points[e].index == 0));
            assert!(c.ascending.iter().all(|&e| r.critical_points[e].index == 2));
        }
        assert!(r.smale.passed);
        assert_eq!(r.complex.ranks, [1, 0, 1]);
        assert!(r.complex.points.iter().any(|p| p.index == 1 && !p.orientable));
    }

    #[test]
    fn rejects_nonpositive_sigma() {
        let a = analysis("cyclic:3");
        assert!(build_invariant_morse(&a.orbifold, 0.0).is_err());
    }
}
