//! Represented matroids over GF(2), GF(5) and the product ring GF(5)^6, with
//! the tooling needed to enumerate and verify fragile matroid classes.

pub mod algebra;
pub mod catalog;
pub mod format;
pub mod fragility;
pub mod harness;
pub mod iso;
pub mod linalg;
pub mod matroid;
pub mod structure;

pub use algebra::{Field, Gf2, Gf5, Gf5x6, Ring, RingValue, Scalar};
pub use matroid::{ElementSet, LinearMatroid, MatroidError};

pub type BinaryMatroid = LinearMatroid<Gf2>;
pub type Gf5Matroid = LinearMatroid<Gf5>;
pub type ProductMatroid = LinearMatroid<Gf5x6>;
