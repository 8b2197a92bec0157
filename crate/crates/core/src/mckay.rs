//! Character table, McKay quiver and extended Dynkin type of a finite
//! subgroup of SU(2).
//!
//! Characters come from the class-sum method: the normalized class
//! multiplication matrices commute and are normal, so a random Hermitian
//! combination of them has the irreducible characters as eigenvectors.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{ClassPartition, FiniteSubgroup, GroupSpec};

const EIGEN_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McKayTolerances {
    /// Orthogonality residual and integrality of character degrees.
    pub character: f64,
    /// Distance of quiver entries from the nearest integer.
    pub quiver: f64,
}

impl Default for McKayTolerances {
    fn default() -> Self {
        McKayTolerances { character: 1e-8, quiver: 1e-6 }
    }
}
const SEED_ATTEMPTS: u64 = 8;

fn ser_complex_rows<S: Serializer>(rows: &[Vec<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { (x * 1e12).round() / 1e12 };
    let pairs: Vec<Vec<[f64; 2]>> =
        rows.iter().map(|r| r.iter().map(|z| [clean(z.re), clean(z.im)]).collect()).collect();
    pairs.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterTable {
    pub class_labels: Vec<String>,
    pub class_sizes: Vec<usize>,
    /// `characters[i][c]` is the value of irrep i on class c; irreps are
    /// ordered by dimension, trivial first.
    #[serde(serialize_with = "ser_complex_rows")]
    pub characters: Vec<Vec<Complex64>>,
    pub dimensions: Vec<usize>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// `Σ_c |c| χ_i(c) conj(χ_j(c))`.
    pub fn inner(&self, i: usize, j: usize) -> Complex64 {
        (0..self.class_sizes.len())
            .map(|c| self.characters[i][c] * self.characters[j][c].conj() * self.class_sizes[c] as f64)
            .sum()
    }

    /// Largest deviation of the row orthogonality relations, relative to |G|.
    pub fn orthogonality_residual(&self) -> f64 {
        let order: usize = self.class_sizes.iter().sum();
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                let target = if i == j { order as f64 } else { 0.0 };
                worst = worst.max((self.inner(i, j) - target).norm() / order as f64);
            }
        }
        worst
    }
}

/// Structure constants: `a[j][k][l]` is the number of `x ∈ C_j` with
/// `x⁻¹·z ∈ C_k` for a fixed `z ∈ C_l`.
fn class_constants(g: &FiniteSubgroup, classes: &ClassPartition) -> Vec<Vec<Vec<f64>>> {
    let m = classes.len();
    let mut a = vec![vec![vec![0.0; m]; m]; m];
    for (l, cl) in classes.classes.iter().enumerate() {
        let z = cl.representative;
        for (j, cj) in classes.classes.iter().enumerate() {
            for &x in &cj.members {
                let k = classes.class_of[g.mul(g.inverse(x), z)];
                a[j][k][l] += 1.0;
            }
        }
    }
    a
}

pub fn character_table(g: &FiniteSubgroup, classes: &ClassPartition, tol: &McKayTolerances) -> Result<CharacterTable> {
    let m = classes.len();
    let order = g.order();
    let sizes: Vec<usize> = classes.classes.iter().map(|c| c.members.len()).collect();
    let root: Vec<f64> = sizes.iter().map(|&s| (s as f64).sqrt()).collect();
    let id_class = classes.class_of[g.identity];
    let a = class_constants(g, classes);
    // N_j = D^{-1/2} M_j D^{1/2} with (M_j)_{k,l} = a_{jkl} and D = diag |C_k|.
    let normal: Vec<DMatrix<Complex64>> = (0..m)
        .map(|j| DMatrix::from_fn(m, m, |k, l| Complex64::new(a[j][k][l] * root[l] / root[k], 0.0)))
        .collect();

    for seed in 0..SEED_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = DMatrix::<Complex64>::zeros(m, m);
        for n in &normal {
            let adj = n.adjoint();
            let (p, q): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            h += (n + &adj) * Complex64::new(p, 0.0) + (n - &adj) * Complex64::new(0.0, q);
        }
        let eig = h.symmetric_eigen();
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let scale = ev.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
        if ev.windows(2).any(|w| w[1] - w[0] < EIGEN_GAP * scale) {
            continue;
        }
        let mut characters = Vec::with_capacity(m);
        for i in 0..m {
            let v: Vec<Complex64> = (0..m).map(|k| eig.eigenvectors[(k, i)] / root[k]).collect();
            let base = v[id_class];
            if base.norm() < tol.character {
                return Err(Error::Numeric("eigenvector vanishes on the identity class".into()));
            }
            let ratio: Vec<Complex64> = v.iter().map(|x| x / base).collect();
            let norm: f64 = (0..m).map(|k| sizes[k] as f64 * ratio[k].norm_sqr()).sum();
            let dim = (order as f64 / norm).sqrt();
            characters.push(ratio.into_iter().map(|x| x * dim).collect::<Vec<_>>());
        }
        return finish_table(classes, sizes, characters, id_class, order, tol.character);
    }
    Err(Error::Numeric(format!("class-sum eigenvalues stayed degenerate over {SEED_ATTEMPTS} seeds")))
}

fn finish_table(
    classes: &ClassPartition,
    sizes: Vec<usize>,
    mut characters: Vec<Vec<Complex64>>,
    id_class: usize,
    order: usize,
    tol: f64,
) -> Result<CharacterTable> {
    let mut dimensions = Vec::with_capacity(characters.len());
    for chi in &characters {
        let d = chi[id_class].re;
        if (d - d.round()).abs() > tol || d.round() < 1.0 {
            return Err(Error::Numeric(format!("character degree {d} is not a positive integer")));
        }
        dimensions.push(d.round() as usize);
    }
    let key = |chi: &Vec<Complex64>| -> Vec<i64> {
        chi.iter().flat_map(|z| [-(z.re * 1e6).round() as i64, -(z.im * 1e6).round() as i64]).collect()
    };
    let mut idx: Vec<usize> = (0..characters.len()).collect();
    idx.sort_by_key(|&i| (dimensions[i], key(&characters[i])));
    characters = idx.iter().map(|&i| characters[i].clone()).collect();
    dimensions = idx.iter().map(|&i| dimensions[i]).collect();

    let table = CharacterTable {
        class_labels: classes.classes.iter().map(|c| c.label.clone()).collect(),
        class_sizes: sizes,
        characters,
        dimensions,
    };
    let residual = table.orthogonality_residual();
    if residual > tol {
        return Err(Error::Numeric(format!("row orthogonality residual {residual:e}")));
    }
    let sq: usize = table.dimensions.iter().map(|d| d * d).sum();
    if sq != order {
        return Err(Error::Numeric(format!("Σ dim² = {sq}, |G| = {order}")));
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "series", content = "rank")]
pub enum AdeType {
    /// Ã_r, with r+1 nodes.
    A(usize),
    /// D̃_r, with r+1 nodes.
    D(usize),
    E6,
    E7,
    E8,
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(r) => write!(f, "Ã{r}"),
            AdeType::D(r) => write!(f, "D̃{r}"),
            AdeType::E6 => write!(f, "Ẽ6"),
            AdeType::E7 => write!(f, "Ẽ7"),
            AdeType::E8 => write!(f, "Ẽ8"),
        }
    }
}

pub fn ade_type(spec: GroupSpec) -> AdeType {
    match spec {
        GroupSpec::Cyclic(n) => AdeType::A(n as usize - 1),
        GroupSpec::BinaryDihedral(n) => AdeType::D(n as usize + 2),
        GroupSpec::BinaryTetrahedral => AdeType::E6,
        GroupSpec::BinaryOctahedral => AdeType::E7,
        GroupSpec::BinaryIcosahedral => AdeType::E8,
    }
}

/// Symmetric multigraph, `adj[i][j]` = number of edges.
pub type Graph = Vec<Vec<u32>>;

fn graph_from_edges(nodes: usize, edges: &[(usize, usize)]) -> Graph {
    let mut g = vec![vec![0; nodes]; nodes];
    for &(a, b) in edges {
        g[a][b] += 1;
        g[b][a] += 1;
    }
    g
}

/// Star with node 0 at the centre and arms of the given lengths.
fn star(arms: &[usize]) -> Graph {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    graph_from_edges(next, &edges)
}

/// The extended Dynkin diagram of the given type.
pub fn reference_graph(t: AdeType) -> Graph {
    match t {
        AdeType::A(1) => graph_from_edges(2, &[(0, 1), (0, 1)]),
        AdeType::A(r) => graph_from_edges(r + 1, &(0..=r).map(|i| (i, (i + 1) % (r + 1))).collect::<Vec<_>>()),
        AdeType::D(4) => star(&[1, 1, 1, 1]),
        AdeType::D(r) => {
            // Spine 0..=r-4 with two leaves at each end.
            let spine = r - 3;
            let mut edges: Vec<(usize, usize)> = (0..spine - 1).map(|i| (i, i + 1)).collect();
            edges.extend([(0, spine), (0, spine + 1), (spine - 1, spine + 2), (spine - 1, spine + 3)]);
            graph_from_edges(r + 1, &edges)
        }
        AdeType::E6 => star(&[2, 2, 2]),
        AdeType::E7 => star(&[3, 3, 1]),
        AdeType::E8 => star(&[5, 2, 1]),
    }
}

fn to_petgraph(g: &Graph) -> UnGraph<(), u32> {
    let mut out = UnGraph::with_capacity(g.len(), g.len());
    let nodes: Vec<_> = (0..g.len()).map(|_| out.add_node(())).collect();
    for i in 0..g.len() {
        for j in i..g.len() {
            if g[i][j] > 0 {
                out.add_edge(nodes[i], nodes[j], g[i][j]);
            }
        }
    }
    out
}

/// Isomorphism of multigraphs, matching edge multiplicities.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    is_isomorphic_matching(&to_petgraph(a), &to_petgraph(b), |_, _| true, |x, y| x == y)
}

#[derive(Clone, Debug, Serialize)]
pub struct McKayQuiver {
    /// Irrep names `ρ0, ρ1, …` with their dimensions; ρ0 is trivial.
    pub nodes: Vec<String>,
    pub dimensions: Vec<usize>,
    pub adjacency: Graph,
    pub ade_label: String,
    #[serde(skip)]
    pub ade: AdeType,
}

impl McKayQuiver {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph \"{}\" {{\n", self.ade_label);
        for (i, (name, dim)) in self.nodes.iter().zip(&self.dimensions).enumerate() {
            out += &format!("  n{i} [label=\"{name} ({dim})\"];\n");
        }
        for i in 0..self.nodes.len() {
            for j in i..self.nodes.len() {
                for _ in 0..self.adjacency[i][j] {
                    out += &format!("  n{i} -- n{j};\n");
                }
            }
        }
        out + "}\n"
    }

    /// The diagram with the trivial-representation node removed.
    pub fn unextended(&self) -> Graph {
        self.adjacency[1..].iter().map(|row| row[1..].to_vec()).collect()
    }
}

pub fn mckay_quiver(
    g: &FiniteSubgroup,
    table: &CharacterTable,
    classes: &ClassPartition,
    tol: &McKayTolerances,
) -> Result<McKayQuiver> {
    let m = table.len();
    let order = g.order() as f64;
    let std: Vec<f64> = classes.classes.iter().map(|c| 2.0 * g.elements[c.representative].su2().0.re).collect();
    let mut adjacency = vec![vec![0u32; m]; m];
    for i in 0..m {
        for j in 0..m {
            let z: Complex64 = (0..m)
                .map(|c| {
                    table.characters[i][c] * std[c] * table.characters[j][c].conj() * table.class_sizes[c] as f64
                })
                .sum::<Complex64>()
                / order;
            let r = z.re.round();
            if (z.re - r).abs() >= tol.quiver || z.im.abs() >= tol.quiver || r < 0.0 {
                return Err(Error::Numeric(format!("quiver entry ({i},{j}) = {z} is not a nonnegative integer")));
            }
            adjacency[i][j] = r as u32;
        }
    }
    for i in 0..m {
        let row = (0..m).map(|j| adjacency[i][j] as usize * table.dimensions[j]).sum::<usize>();
        if row != 2 * table.dimensions[i] || (0..m).any(|j| adjacency[i][j] != adjacency[j][i]) {
            return Err(Error::Verification(format!("quiver row {i} fails ρ_i ⊗ V = Σ a_ij ρ_j")));
        }
    }
    let ade = ade_type(g.spec);
    if !isomorphic(&adjacency, &reference_graph(ade)) {
        return Err(Error::Verification(format!("quiver of {} is not {ade}", g.spec)));
    }
    Ok(McKayQuiver {
        nodes: (0..m).map(|i| format!("ρ{i}")).collect(),
        dimensions: table.dimensions.clone(),
        adjacency,
        ade_label: ade.to_string(),
        ade,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{conjugacy_classes, enumerate};

    fn build(spec: GroupSpec) -> (FiniteSubgroup, ClassPartition, CharacterTable) {
        let g = enumerate(spec).unwrap();
        let c = conjugacy_classes(&g);
        let t = character_table(&g, &c, &McKayTolerances::default()).unwrap();
        (g, c, t)
    }

    #[test]
    fn cyclic_three_characters_are_cube_roots() {
        let (_, _, t) = build(GroupSpec::Cyclic(3));
        assert_eq!(t.dimensions, vec![1, 1, 1]);
        for chi in &t.characters {
            for z in chi {
                assert!((z.powu(3) - 1.0).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn tetrahedral_dimensions() {
        let (_, _, t) = build(GroupSpec::BinaryTetrahedral);
        assert_eq!(t.dimensions, vec![1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn icosahedral_dimensions() {
        let (_, _, t) = build(GroupSpec::BinaryIcosahedral);
        assert_eq!(t.len(), 9);
        assert_eq!(t.dimensions, vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);
    }

    #[test]
    fn reference_graphs_have_expected_shape() {
        for (t, nodes) in [(AdeType::A(1), 2), (AdeType::A(5), 6), (AdeType::D(4), 5), (AdeType::D(7), 8), (AdeType::E6, 7), (AdeType::E7, 8), (AdeType::E8, 9)] {
            let g = reference_graph(t);
            assert_eq!(g.len(), nodes, "{t}");
        }
        let d7 = reference_graph(AdeType::D(7));
        assert_eq!(d7.iter().filter(|r| r.iter().sum::<u32>() == 1).count(), 4);
        assert!(!isomorphic(&reference_graph(AdeType::E7), &reference_graph(AdeType::A(7))));
        assert!(!isomorphic(&reference_graph(AdeType::E7), &reference_graph(AdeType::D(7))));
    }

    #[test]
    fn quivers_match_ade_lookup() {
        let cases = [
            (GroupSpec::Cyclic(2), "Ã1", 2),
            (GroupSpec::Cyclic(4), "Ã3", 4),
            (GroupSpec::BinaryDihedral(2), "D̃4", 5),
            (GroupSpec::BinaryDihedral(4), "D̃6", 7),
            (GroupSpec::BinaryTetrahedral, "Ẽ6", 7),
            (GroupSpec::BinaryOctahedral, "Ẽ7", 8),
            (GroupSpec::BinaryIcosahedral, "Ẽ8", 9),
        ];
        for (spec, label, nodes) in cases {
            let (g, c, t) = build(spec);
            let q = mckay_quiver(&g, &t, &c, &McKayTolerances::default()).unwrap();
            assert_eq!(q.ade_label, label);
            assert_eq!(q.node_count(), nodes);
            assert_eq!(q.node_count(), c.len());
        }
        let (g, c, t) = build(GroupSpec::Cyclic(2));
        assert_eq!(mckay_quiver(&g, &t, &c, &McKayTolerances::default()).unwrap().adjacency, vec![vec![0, 2], vec![2, 0]]);
    }

    #[test]
    fn removing_trivial_node_leaves_a_tree() {
        for spec in [GroupSpec::Cyclic(5), GroupSpec::BinaryDihedral(3), GroupSpec::BinaryIcosahedral] {
            let (g, c, t) = build(spec);
            let q = mckay_quiver(&g, &t, &c, &McKayTolerances::default()).unwrap();
            let u = q.unextended();
            let edges: u32 = u.iter().flatten().sum::<u32>() / 2;
            assert_eq!(edges as usize, u.len() - 1, "{spec}");
            assert!(u.iter().flatten().all(|&e| e <= 1));
        }
    }

    #[test]
    fn dot_export_lists_every_edge() {
        let (g, c, t) = build(GroupSpec::BinaryTetrahedral);
        let dot = mckay_quiver(&g, &t, &c, &McKayTolerances::default()).unwrap().to_dot();
        assert_eq!(dot.matches(" -- ").count(), 6);
        assert!(dot.starts_with("graph \"Ẽ6\""));
    }
}
