use std::fmt::Write;

use mckay_ch::groups::Family;
use mckay_ch::homology::{self, DirectLimit, GradedRanks};
use mckay_ch::homotopy::{class_table, ClassRow};
use mckay_ch::mckay::{character_table, mckay_quiver, McKayTolerances};
use mckay_ch::reeb::{degree_census, threshold, ReebOrbit};
use mckay_ch::{Analysis, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct Report {
    pub group: String,
    pub family: Family,
    pub order: usize,
    pub conjugacy_classes: usize,
    pub classes: Vec<ClassSummary>,
    pub orbifold: Vec<PointSummary>,
    pub levels: Vec<LevelReport>,
    pub inclusions: Vec<InclusionSummary>,
    pub direct_limit: DirectLimit,
    pub class_table: Vec<ClassTableRow>,
    pub mckay: McKaySummary,
}

#[derive(Serialize)]
pub struct ClassSummary {
    pub label: String,
    pub element_order: u32,
    pub size: usize,
}

#[derive(Serialize)]
pub struct PointSummary {
    pub name: String,
    pub morse_index: u8,
    pub isotropy: usize,
    pub multiplicity: u64,
    pub orbit_size: usize,
    pub representative: [f64; 3],
}

#[derive(Serialize)]
pub struct OrbitRow {
    pub label: String,
    pub point: String,
    pub iterate: u64,
    pub action: String,
    pub action_value: f64,
    pub cz: i64,
    pub grading: i64,
    pub good: bool,
    pub contractible: bool,
    pub class: String,
}

#[derive(Serialize)]
pub struct CensusRow {
    pub grading: i64,
    pub total: usize,
    pub good: usize,
    pub orbits: Vec<String>,
}

#[derive(Serialize)]
pub struct LevelReport {
    pub level: u32,
    /// Action threshold divided by π.
    pub threshold: String,
    pub orbits: Vec<OrbitRow>,
    pub census: Vec<CensusRow>,
    pub ranks: GradedRanks,
}

#[derive(Serialize)]
pub struct InclusionSummary {
    pub source: u32,
    pub target: u32,
    pub mapped: usize,
    pub target_generators: usize,
}

#[derive(Serialize)]
pub struct ClassTableRow {
    pub label: String,
    pub element_order: u32,
    pub orbits: Vec<String>,
}

#[derive(Serialize)]
pub struct McKaySummary {
    pub ade_type: String,
    pub node_count: usize,
    pub dimensions: Vec<usize>,
    pub adjacency: Vec<Vec<u32>>,
    pub rank_check: bool,
}

fn orbit_row(a: &Analysis, o: &ReebOrbit, eps: f64) -> OrbitRow {
    OrbitRow {
        label: o.label(),
        point: o.base_name.clone(),
        iterate: o.k,
        action: o.action.to_string(),
        action_value: o.action.value(eps),
        cz: o.cz,
        grading: o.grading,
        good: o.good,
        contractible: o.contractible,
        class: a.classes.classes[a.class_of(o)].label.clone(),
    }
}

fn class_row(r: &ClassRow) -> ClassTableRow {
    ClassTableRow {
        label: r.label.clone(),
        element_order: r.element_order,
        orbits: r.residues.iter().map(|x| x.to_string()).collect(),
    }
}

pub fn build(a: &Analysis, max_level: u32, eps: f64, mckay_tol: &McKayTolerances) -> Result<Report> {
    let mut levels = Vec::new();
    let mut complexes = Vec::new();
    for n in 1..=max_level {
        let orbits = a.orbits(n)?;
        let census = degree_census(&orbits);
        let census = census
            .counts
            .iter()
            .map(|(&g, e)| CensusRow {
                grading: g,
                total: e.total,
                good: e.good,
                orbits: orbits.iter().filter(|o| o.grading == g).map(|o| o.label()).collect(),
            })
            .collect();
        levels.push(LevelReport {
            level: n,
            threshold: threshold(a.spec, n).to_string(),
            orbits: orbits.iter().map(|o| orbit_row(a, o, eps)).collect(),
            census,
            ranks: homology::filtered_homology_ranks(a, n)?,
        });
        complexes.push(homology::filtered_complex(&orbits, n)?);
    }
    let mut inclusions = Vec::new();
    for w in complexes.windows(2) {
        let inc = homology::inclusion_map(a, &w[0], &w[1])?;
        inclusions.push(InclusionSummary {
            source: inc.source,
            target: inc.target,
            mapped: inc.pairs.len(),
            target_generators: w[1].generators.len(),
        });
    }
    let direct_limit = homology::direct_limit(a, max_level.max(2))?;
    let table = character_table(&a.group, &a.classes, mckay_tol)?;
    let quiver = mckay_quiver(&a.group, &table, &a.classes, mckay_tol)?;
    let mckay = McKaySummary {
        ade_type: quiver.ade_label.clone(),
        node_count: quiver.node_count(),
        dimensions: quiver.dimensions.clone(),
        adjacency: quiver.adjacency.clone(),
        rank_check: homology::mckay_rank_check(&direct_limit, quiver.node_count()),
    };
    Ok(Report {
        group: a.spec.to_string(),
        family: a.spec.family(),
        order: a.group.order(),
        conjugacy_classes: a.m(),
        classes: a
            .classes
            .classes
            .iter()
            .map(|c| ClassSummary { label: c.label.clone(), element_order: c.element_order, size: c.members.len() })
            .collect(),
        orbifold: a
            .orbifold
            .points
            .iter()
            .map(|p| PointSummary {
                name: p.name.clone(),
                morse_index: p.morse_index,
                isotropy: p.isotropy,
                multiplicity: p.d,
                orbit_size: p.orbit_size,
                representative: p.representative.map(|x| (x * 1e12).round() / 1e12 + 0.0),
            })
            .collect(),
        levels,
        inclusions,
        direct_limit,
        class_table: class_table(a).iter().map(class_row).collect(),
        mckay,
    })
}

fn ranks_line(r: &GradedRanks) -> String {
    r.iter().map(|(d, k)| format!("{d}: {k}")).collect::<Vec<_>>().join(", ")
}

pub fn markdown(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {} (order {}, {} conjugacy classes)\n", r.group, r.order, r.conjugacy_classes);
    let _ = writeln!(s, "## Orbifold points\n");
    let _ = writeln!(s, "| Point | Morse index | Isotropy | Multiplicity d | Orbit size |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for p in &r.orbifold {
        let _ = writeln!(s, "| {} | {} | {} | {} | {} |", p.name, p.morse_index, p.isotropy, p.multiplicity, p.orbit_size);
    }
    for lv in &r.levels {
        let _ = writeln!(s, "\n## Level {} (threshold {}π)\n", lv.level, lv.threshold);
        let _ = writeln!(s, "| Grading | Index | Orbits | c_i |");
        let _ = writeln!(s, "|---|---|---|---|");
        for c in &lv.census {
            let names: Vec<String> = lv
                .orbits
                .iter()
                .filter(|o| o.grading == c.grading)
                .map(|o| if o.good { o.label.clone() } else { format!("{} (bad)", o.label) })
                .collect();
            let _ = writeln!(s, "| {} | {} | {} | {} |", c.grading, c.grading + 1, names.join(", "), c.total);
        }
        let _ = writeln!(s, "\nFiltered homology ranks: {}", ranks_line(&lv.ranks));
    }
    if !r.inclusions.is_empty() {
        let _ = writeln!(s, "\n## Inclusions\n");
        for inc in &r.inclusions {
            let _ = writeln!(
                s,
                "- level {} → {}: {} of {} generators",
                inc.source, inc.target, inc.mapped, inc.target_generators
            );
        }
    }
    let d = &r.direct_limit;
    let _ = writeln!(s, "\n## Direct limit\n");
    let _ = writeln!(s, "Ranks: {} (even degrees continue at {})", ranks_line(&d.ranks), r.conjugacy_classes);
    let _ = writeln!(
        s,
        "Decomposition: ℚ^{} in each even degree plus H_*(S²;ℚ) shifted by 2i; Σ(d/2 − 1) = {}",
        d.twisted_rank, d.orbifold_defect
    );
    let _ = writeln!(s, "\n## Conjugacy classes and represented orbits\n");
    let _ = writeln!(s, "| Class | Order | Orbits |");
    let _ = writeln!(s, "|---|---|---|");
    for row in &r.class_table {
        let _ = writeln!(s, "| {} | {} | {} |", row.label, row.element_order, row.orbits.join(", "));
    }
    let m = &r.mckay;
    let _ = writeln!(s, "\n## McKay correspondence\n");
    let _ = writeln!(
        s,
        "Quiver type {} with {} nodes (dimensions {:?}); rank check {}",
        m.ade_type,
        m.node_count,
        m.dimensions,
        if m.rank_check { "passed" } else { "FAILED" }
    );
    s
}

