//! Exact computer algebra for the Lie algebras g(γ,Q) attached to rational
//! quantum tori: brackets, embeddings, automorphisms, derivations,
//! 2-cocycles and the universal central extension.

pub mod algebra;
pub mod cli;
pub mod cohomology;
pub mod cyclotomic;
pub mod error;
pub mod intmat;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
