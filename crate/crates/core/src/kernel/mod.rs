//! The dependent layer: core syntax, evaluation, definitional equality and
//! elaboration of surface declarations.

pub mod conv;
pub mod ctx;
pub mod decl;
pub mod elab;
pub mod pretty;
pub mod quote;
pub mod syntax;
pub mod value;
