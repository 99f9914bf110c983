//! Symmetric-stress mixed finite elements on simplicial meshes in `R^n`.
//!
//! The stress is approximated in an `H(div)`-conforming space of symmetric
//! `P_k` tensors and the displacement by discontinuous `P_{k-1}` vectors,
//! `k >= n + 1`. The crate builds the elements from their degrees of freedom,
//! assembles the Hellinger–Reissner saddle-point system, and provides the
//! checks and studies used to verify the construction.

pub mod analysis;
pub mod assembly;
pub mod combinat;
pub mod elements;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod polynomial;
pub mod symtensor;

pub use error::{FemError, Result};
