//! Test support for eac: seeded generators of valid cases and reference
//! evaluators that the library is checked against.

pub mod gen;
pub mod oracle;

pub use gen::{random_case, rng, Shape};
