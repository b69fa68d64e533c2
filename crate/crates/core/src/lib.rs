//! Proof checker for simplicial homotopy type theory.

pub mod corpus;
pub mod diagnostic;
pub mod driver;
pub mod kernel;
pub mod surface;
pub mod tope;
