//! Cylindrical contact homology of the links of the simple singularities
//! `ℂ²/G`, computed combinatorially from the finite group `G ⊂ SU(2)`.
//!
//! [`Analysis`] bundles the data every downstream computation needs: the
//! enumerated group, its conjugacy classes, the rotation image H, the
//! orbifold points of S²/H and the homotopy classes of their fibers.

pub mod error;
pub mod exactfield;
pub mod groups;
pub mod homology;
pub mod homotopy;
pub mod mckay;
pub mod morse_lab;
pub mod orbifold;
pub mod reeb;

pub use error::{Error, Result};

use groups::{ClassPartition, FiniteSubgroup, GroupSpec, RotationGroup};
use homotopy::ClassAssignment;
use orbifold::Orbifold;
use reeb::ReebOrbit;

#[derive(Clone, Debug)]
pub struct Analysis {
    pub spec: GroupSpec,
    pub group: FiniteSubgroup,
    pub classes: ClassPartition,
    pub rotations: RotationGroup,
    pub orbifold: Orbifold,
    pub lifts: ClassAssignment,
}

impl Analysis {
    pub fn new(spec: GroupSpec) -> Result<Analysis> {
        let group = groups::enumerate(spec)?;
        let mut classes = groups::conjugacy_classes(&group);
        let rotations = groups::image_h(&group);
        let orbifold = Orbifold::build(&group, &rotations)?;
        let lifts = ClassAssignment::build(&group, &classes, &orbifold)?;
        homotopy::canonical_labels(&group, &mut classes, &orbifold, &lifts);
        Ok(Analysis { spec, group, classes, rotations, orbifold, lifts })
    }

    /// Number of conjugacy classes.
    pub fn m(&self) -> usize {
        self.classes.len()
    }

    pub fn orbits(&self, level: u32) -> Result<Vec<ReebOrbit>> {
        reeb::enumerate_orbits(&self.orbifold, self.spec, level)
    }

    pub fn class_of(&self, orbit: &ReebOrbit) -> usize {
        self.lifts.class(&self.group, &self.classes, orbit.base, orbit.k)
    }
}
