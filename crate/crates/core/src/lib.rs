//! Parameter-set lattices of mixed orthogonal arrays of strength 2, and
//! geometric constructions of arrays from mixed spreads over prime fields.

pub mod error;
pub mod fixture;
pub mod gf;
pub mod height;
pub mod lattice;
pub mod oa;
pub mod params;
pub mod spread;

pub use error::{Error, Result};
pub use fixture::{FixtureSet, RealizabilityFixture};
pub use gf::Subspace;
pub use lattice::{build_lattice, BuildMode, Lattice, LatticeFamily, LatticeStats, Mode};
pub use oa::OrthogonalArray;
pub use params::{
    degrees_of_freedom, enumerate_parameter_sets, satisfies_conditions, Factor, ParameterSet,
};
pub use spread::MixedSpread;
