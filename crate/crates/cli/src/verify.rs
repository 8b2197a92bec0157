use clap::ValueEnum;
use mckay_ch::groups::{Family, GroupSpec};
use mckay_ch::homology;
use mckay_ch::homotopy::{antipodal_and_distinguish_checks, bad_building_exclusion, verify_prop_cz_action};
use mckay_ch::mckay::{character_table, mckay_quiver, McKayTolerances};
use mckay_ch::morse_lab::{run_morse_lab, MorseConfig};
use mckay_ch::reeb::{degree_census, dynamical_convexity_check, local_model_cz};
use mckay_ch::{Analysis, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tables,
    Prop42,
    Convexity,
    Badbuilding,
    Morse,
    Mckay,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Tables, Suite::Prop42, Suite::Convexity, Suite::Badbuilding, Suite::Morse, Suite::Mckay],
            s => vec![s],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub struct VerifyConfig {
    pub levels: u32,
    pub local_eps: f64,
    pub bad_building_d1: u64,
    pub morse: MorseConfig,
    pub mckay: McKayTolerances,
}

struct Sink {
    suite: Suite,
    out: Vec<CheckResult>,
}

impl Sink {
    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.out.push(CheckResult { suite: self.suite, name: name.into(), passed, detail: detail.into() });
    }
}

/// Orbit counts, isotropy orders and class count of the polyhedral rows.
fn polyhedral_row(spec: GroupSpec) -> Option<[usize; 7]> {
    match spec {
        GroupSpec::BinaryTetrahedral => Some([4, 6, 4, 3, 2, 3, 7]),
        GroupSpec::BinaryOctahedral => Some([6, 12, 8, 4, 2, 3, 8]),
        GroupSpec::BinaryIcosahedral => Some([12, 30, 20, 5, 2, 3, 9]),
        _ => None,
    }
}

fn tables(a: &Analysis, cfg: &VerifyConfig, s: &mut Sink) -> Result<()> {
    let m = a.m();
    s.push("conjugacy class count", m == a.spec.class_count(), format!("{m} classes, expected {}", a.spec.class_count()));
    if let Some(row) = polyhedral_row(a.spec) {
        let p = &a.orbifold.points;
        let got = [p[0].orbit_size, p[1].orbit_size, p[2].orbit_size, p[0].isotropy, p[1].isotropy, p[2].isotropy, m];
        s.push("polyhedral quantities", got == row, format!("(V,E,F,I_V,I_E,I_F,|Conj|) = {got:?}"));
        s.push("|Conj| = I_V + I_E + I_F − 1", m == got[3] + got[4] + got[5] - 1, format!("{m}"));
    }
    let defect: f64 = a.orbifold.points.iter().map(|p| p.d as f64 / 2.0 - 1.0).sum();
    s.push("Σ(d/2 − 1) = m − 2", defect == m as f64 - 2.0, format!("{defect}"));
    for n in 1..=cfg.levels {
        let orbits = a.orbits(n)?;
        let census = degree_census(&orbits);
        let top = 4 * n as i64 - 2;
        let odd_expected = if a.spec.family() == Family::Cyclic { 0 } else { 1 };
        let mut bad = Vec::new();
        for deg in -1..=top + 1 {
            let expected = match deg {
                d if d < 0 || d > top => 0,
                0 => m - 1,
                d if d == top => m - 1,
                d if d % 2 == 0 => m,
                _ => odd_expected,
            };
            let good_expected = if deg % 2 == 0 { expected } else { 0 };
            if census.total(deg) != expected || census.good(deg) != good_expected {
                bad.push(format!("c_{deg} = {} ({} good)", census.total(deg), census.good(deg)));
            }
        }
        s.push(format!("degree census level {n}"), bad.is_empty(), bad.join("; "));
    }
    for c in antipodal_and_distinguish_checks(a)? {
        s.push(c.name, c.passed, "");
    }
    Ok(())
}

fn prop42(a: &Analysis, cfg: &VerifyConfig, s: &mut Sink) -> Result<()> {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for n in 1..=cfg.levels {
        for m in n..=cfg.levels {
            let r = verify_prop_cz_action(a, n, m)?;
            pairs += r.pairs_checked;
            bad.extend(r.counterexamples);
        }
    }
    let detail = if bad.is_empty() { format!("{pairs} same-class pairs") } else { bad.join("; ") };
    s.push("index forces action order", bad.is_empty(), detail);
    Ok(())
}

fn convexity(a: &Analysis, cfg: &VerifyConfig, s: &mut Sink) -> Result<()> {
    for n in 1..=cfg.levels {
        let r = dynamical_convexity_check(&a.orbits(n)?);
        let detail = if r.passed() { format!("{} contractible orbits", r.contractible_checked) } else { r.violations.join("; ") };
        s.push(format!("dynamical convexity level {n}"), r.passed(), detail);
    }
    let mut bad = Vec::new();
    let orbits = a.orbits(2)?;
    for o in &orbits {
        let model = local_model_cz(o.kind, o.d, o.k, cfg.local_eps)?;
        if model.cz != o.cz {
            bad.push(format!("{}: numeric {} vs closed form {}", o.label(), model.cz, o.cz));
        }
    }
    let detail = if bad.is_empty() { format!("{} orbits below L_2", orbits.len()) } else { bad.join("; ") };
    s.push("local model index", bad.is_empty(), detail);
    Ok(())
}

fn badbuilding(a: &Analysis, cfg: &VerifyConfig, s: &mut Sink) -> Result<()> {
    let r = bad_building_exclusion(a, cfg.bad_building_d1)?;
    let indices: Vec<String> = r.rows.iter().map(|(d1, i)| format!("d1={d1}: {i}")).collect();
    s.push(
        format!("bad building over {} (d2 = {})", r.orbit, r.d2),
        r.passed,
        format!("plane index {}; {}", r.plane_index, indices.join(", ")),
    );
    Ok(())
}

fn morse(a: &Analysis, cfg: &VerifyConfig, s: &mut Sink) -> Result<()> {
    match run_morse_lab(&a.orbifold, &a.rotations, &cfg.morse) {
        Ok(r) => {
            s.push("critical set equals Fix(H)", true, format!("σ = {:.4}, index counts {:?}", r.sigma, r.index_counts));
            s.push("H-invariance", r.invariance_passed, format!("residual {:e}", r.invariance_residual));
            s.push(
                "Smale condition",
                r.smale.passed,
                format!("saddle level spread {:e}, saddle-saddle lines {}", r.smale.saddle_level_spread, r.smale.saddle_to_saddle),
            );
            s.push("orbifold Morse homology", r.complex.ranks == [1, 0, 1], format!("ranks {:?}", r.complex.ranks));
        }
        Err(e) => s.push("critical set equals Fix(H)", false, e.to_string()),
    }
    Ok(())
}

fn mckay(a: &Analysis, cfg: &VerifyConfig, s: &mut Sink) -> Result<()> {
    let quiver = character_table(&a.group, &a.classes, &cfg.mckay)
        .and_then(|t| mckay_quiver(&a.group, &t, &a.classes, &cfg.mckay));
    match quiver {
        Ok(q) => {
            s.push("quiver type", true, q.ade_label.clone());
            s.push("node count = |Conj(G)|", q.node_count() == a.m(), format!("{} nodes", q.node_count()));
            let limit = homology::direct_limit(a, cfg.levels.max(2))?;
            s.push("stable rank = node count", homology::mckay_rank_check(&limit, q.node_count()), format!("{:?}", limit.ranks));
        }
        Err(e) => s.push("quiver type", false, e.to_string()),
    }
    Ok(())
}

pub fn run(a: &Analysis, suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for s in suite.expand() {
        let mut sink = Sink { suite: s, out: Vec::new() };
        match s {
            Suite::Tables => tables(a, cfg, &mut sink)?,
            Suite::Prop42 => prop42(a, cfg, &mut sink)?,
            Suite::Convexity => convexity(a, cfg, &mut sink)?,
            Suite::Badbuilding => badbuilding(a, cfg, &mut sink)?,
            Suite::Morse => morse(a, cfg, &mut sink)?,
            Suite::Mckay => mckay(a, cfg, &mut sink)?,
            Suite::All => unreachable!("expanded above"),
        }
        out.extend(sink.out);
    }
    Ok(out)
}

pub fn markdown(group: &str, checks: &[CheckResult]) -> String {
    let mut s = format!("# Verification of {group}\n\n| Suite | Check | Result | Detail |\n|---|---|---|---|\n");
    for c in checks {
        let suite = serde_json::to_value(c.suite).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let cell = |t: &str| t.replace('|', "\\|");
        s += &format!(
            "| {} | {} | {} | {} |\n",
            suite,
            cell(&c.name),
            if c.passed { "pass" } else { "FAIL" },
            cell(&c.detail)
        );
    }
    s
}
