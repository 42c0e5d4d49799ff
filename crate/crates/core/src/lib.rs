//! Injective regions of projected entangled pair states on square grids.
//!
//! Given a family `𝒜 = (A₁,…,A_d)` of tensors in `(ℂ^D)^⊗2n`, a grid `G` is an
//! injective region when the contractions of `G` over all placements of
//! family members span the whole boundary space `(ℂ^D)^⊗E_O(G)`. The crate
//! decides this exactly or in floating point, produces checkable witness
//! certificates, computes the injectivity length of matrix product states,
//! and searches for minimal injective grid sizes.

pub mod contraction;
pub mod error;
pub mod generators;
pub mod grid;
pub mod injectivity;
pub mod io;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod tensor;

pub use contraction::{Assignment, Family, Limits, TensorFamily};
pub use error::{Error, Result};
pub use grid::GridSpec;
