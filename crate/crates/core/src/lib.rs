//! Finite lattices, transfer systems, weak factorization systems and the
//! model structures they assemble into.

pub mod arrows;
pub mod bits;
pub mod enumeration;
pub mod error;
pub mod io;
pub mod lattice;
pub mod lifting;
pub mod model;
pub mod reproduce;

pub use arrows::{ArrowSet, Closure};
pub use error::{Error, Result};
pub use lattice::{Arrow, Elem, Lattice, Shape};
pub use lifting::Wfs;
pub use model::{AfInterval, ModelStructure};
