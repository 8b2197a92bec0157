#![allow(dead_code)]

pub mod tables;

use std::sync::OnceLock;

use mckay_ch::groups::GroupSpec;
use mckay_ch::Analysis;

/// Every group exercised at desk scale: cyclic 2..=12, dihedral 2..=8, T, O, I.
pub fn desk_specs() -> Vec<GroupSpec> {
    let mut v: Vec<GroupSpec> = (2..=12).map(GroupSpec::Cyclic).collect();
    v.extend((2..=8).map(GroupSpec::BinaryDihedral));
    v.extend([GroupSpec::BinaryTetrahedral, GroupSpec::BinaryOctahedral, GroupSpec::BinaryIcosahedral]);
    v
}

pub fn analyses() -> &'static [Analysis] {
    static CACHE: OnceLock<Vec<Analysis>> = OnceLock::new();
    CACHE.get_or_init(|| desk_specs().into_iter().map(|s| Analysis::new(s).expect("analysis")).collect())
}

pub fn analysis(spec: GroupSpec) -> &'static Analysis {
    analyses().iter().find(|a| a.spec == spec).expect("desk-scale group")
}
