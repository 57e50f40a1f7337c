//! Discrete Gaussian sampling over shifted lattices, the pair-averaging
//! coset combiner, and an exact closest-vector solver built on top of them,
//! with enumeration oracles that check every step at small dimension.

pub mod error;
pub mod lattice;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub mod gaussian;
pub mod combiner;
pub mod dgs;
pub mod cvp;
