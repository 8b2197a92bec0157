use std::collections::{BTreeMap, BTreeSet};

use mckay_ch::groups::GroupSpec;
use mckay_ch::homotopy::class_table;
use mckay_ch::Analysis;

pub type Table = BTreeMap<String, (u32, BTreeSet<(String, u64)>)>;

fn row(order: u32, residues: &[(&str, u64)]) -> (u32, BTreeSet<(String, u64)>) {
    (order, residues.iter().map(|(p, r)| (p.to_string(), *r)).collect())
}

pub fn computed(a: &Analysis) -> Table {
    class_table(a)
        .into_iter()
        .map(|r| (r.label, (r.element_order, r.residues.into_iter().map(|x| (x.point, x.r)).collect())))
        .collect()
}

pub fn reference_table(spec: GroupSpec) -> Table {
    let rows: Vec<(&str, u32, Vec<(&str, u64)>)> = match spec {
        GroupSpec::BinaryTetrahedral => vec![
            ("Id", 1, vec![("V", 0), ("E", 0), ("F", 0)]),
            ("-Id", 2, vec![("V", 3), ("E", 2), ("F", 3)]),
            ("T_4", 4, vec![("E", 1), ("E", 3)]),
            ("T_{6,A}", 6, vec![("V", 1), ("F", 5)]),
            ("T_{6,B}", 6, vec![("F", 1), ("V", 5)]),
            ("T_{3,A}", 3, vec![("V", 2), ("F", 4)]),
            ("T_{3,B}", 3, vec![("F", 2), ("V", 4)]),
        ],
        GroupSpec::BinaryOctahedral => vec![
            ("Id", 1, vec![("V", 0), ("E", 0), ("F", 0)]),
            ("-Id", 2, vec![("V", 4), ("E", 2), ("F", 3)]),
            ("O_{8,A}", 8, vec![("V", 1), ("V", 7)]),
            ("O_{8,B}", 8, vec![("V", 3), ("V", 5)]),
            ("O_{4,A}", 4, vec![("V", 2), ("V", 6)]),
            ("O_{4,B}", 4, vec![("E", 1), ("E", 3)]),
            ("O_6", 6, vec![("F", 1), ("F", 5)]),
            ("O_3", 3, vec![("F", 2), ("F", 4)]),
        ],
        GroupSpec::BinaryIcosahedral => vec![
            ("Id", 1, vec![("V", 0), ("E", 0), ("F", 0)]),
            ("-Id", 2, vec![("V", 5), ("E", 2), ("F", 3)]),
            ("I_{10,A}", 10, vec![("V", 1), ("V", 9)]),
            ("I_{10,B}", 10, vec![("V", 3), ("V", 7)]),
            ("I_{5,A}", 5, vec![("V", 2), ("V", 8)]),
            ("I_{5,B}", 5, vec![("V", 4), ("V", 6)]),
            ("I_4", 4, vec![("E", 1), ("E", 3)]),
            ("I_6", 6, vec![("F", 1), ("F", 5)]),
            ("I_3", 3, vec![("F", 2), ("F", 4)]),
        ],
        GroupSpec::BinaryDihedral(n) => {
            let n64 = n as u64;
            let mut rows = vec![
                ("Id".to_string(), 1, vec![("e-", 0), ("h", 0), ("e+", 0)]),
                ("-Id".to_string(), 2, vec![("e-", 2), ("h", 2), ("e+", n64)]),
            ];
            if n % 2 == 0 {
                rows.push(("B".into(), 4, vec![("h", 1), ("h", 3)]));
                rows.push(("AB".into(), 4, vec![("e-", 1), ("e-", 3)]));
            } else {
                rows.push(("B".into(), 4, vec![("h", 1), ("e-", 3)]));
                rows.push(("AB".into(), 4, vec![("e-", 1), ("h", 3)]));
            }
            for m in 1..n {
                let order = (2 * n / num_integer::gcd(2 * n, m)) as u32;
                rows.push((format!("A^{m}"), order, vec![("e+", m as u64), ("e+", 2 * n64 - m as u64)]));
            }
            return rows.into_iter().map(|(l, o, r)| (l, row(o, &r))).collect();
        }
        GroupSpec::Cyclic(n) => {
            let n64 = n as u64;
            let mut rows = vec![("Id".to_string(), row(1, &[("s", 0), ("n", 0)]))];
            for m in 1..n64 {
                let order = (n64 / num_integer::gcd(n64, m)) as u32;
                let label = if 2 * m == n64 { "-Id".to_string() } else { format!("g^{m}") };
                rows.push((label, row(order, &[("n", m), ("s", n64 - m)])));
            }
            return rows.into_iter().collect();
        }
    };
    rows.into_iter().map(|(l, o, r)| (l.to_string(), row(o, &r))).collect()
}
