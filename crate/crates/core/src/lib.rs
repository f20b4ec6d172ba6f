//! Exact computations with free hyperplane arrangements: intersection
//! lattices, MAT-partitions, accuracy, and the root-system, deformation,
//! graphic and intermediate families.
//!
//! The core is generic over the scalar field ([`exactmath::Scalar`]);
//! [`QArrangement`] and [`CycArrangement`] fix it to the rationals and to
//! cyclotomic fields.

pub mod accuracy;
pub mod arrangement;
pub mod deformations;
pub mod exactmath;
pub mod graphic;
pub mod intermediate;
pub mod io;
pub mod matfree;
pub mod rootsys;

pub use arrangement::{Arrangement, Flat, FlatId, Lattice, LatticeOptions};
pub use exactmath::{Cyclotomic, Field, IntPoly, Rational, Scalar};

pub type QArrangement = Arrangement<Rational>;
pub type CycArrangement = Arrangement<Cyclotomic>;
pub type QLattice = Lattice<Rational>;
pub type CycLattice = Lattice<Cyclotomic>;
