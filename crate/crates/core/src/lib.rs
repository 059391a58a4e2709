//! Generalized two-norms on complex vector spaces and the variation of
//! curves measured through them.
//!
//! The building blocks are [`spaces::TwoNorm`] pairings, curve descriptions
//! in [`function::FunctionSpec`], and the refinement estimator in
//! [`variation`]. [`bv`] builds the bounded-variation norm on top, and
//! [`harness`] checks the axioms and theorems numerically.

pub mod bv;
pub mod cli;
pub mod error;
pub mod expr;
pub mod function;
pub mod harness;
pub mod numeric;
pub mod spaces;
pub mod variation;
pub mod vector;

pub use error::{Error, Result};
pub use function::{CatalogId, FunctionSpec, Interval};
pub use spaces::{Pairing, TwoNorm};
pub use variation::{
    estimate_variation, Partition, RefineConfig, Status, Strategy, VariationEstimate,
};
pub use vector::ComplexVector;
