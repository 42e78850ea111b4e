//! Explicit non-free tensors in `C^n ⊗ C^n ⊗ C^n`.
//!
//! The crate builds the staircase family `T^W` and its 0/1 representative
//! `S0`, evaluates tensor moment maps and the Kempf–Ness gradient flow, and
//! assembles machine-checkable non-freeness certificates: a Ness minimality
//! witness, the stabilizer block structure of the moment map image and an
//! obstruction showing that no unitary basis change produces a free support.
//!
//! Index conventions: the Rust API is 0-based throughout. Every serialized
//! format (JSON files, CLI output) is 1-based.

pub mod certify;
pub mod construction;
pub mod equivalence;
pub mod error;
pub mod family;
pub mod flow;
pub mod freeness;
pub mod json;
pub mod lp;
pub mod moment;
pub mod named;
pub mod polytope;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
pub use moment::{HermTriple, WeylPoint};
pub use tensor::{GroupTriple, Index3, SupportSet, Tensor3, UnitaryTriple, C64};
