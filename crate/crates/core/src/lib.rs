//! Desk-scale numerical toolkit for the vector-valued ∞-Laplacian system
//!
//! ```text
//! Δ∞u = (Du ⊗ Du + |Du|² [Du]^⊥ ⊗ I) : D²u = 0,
//! ```
//!
//! its variational characterization (rank-one absolute minimality and
//! ∞/p-minimal area of the image), the gradient flow whose trajectories
//! conserve |Du| and carry affine images, the conformal-geometry identities
//! tying the normal part to the mean curvature vector, and a discrete
//! p-Laplacian solver with continuation in p.
//!
//! Maps are symbolic (expression trees per component), so gradients and
//! Hessians are exact; finite differences are kept around strictly as
//! independent cross-check oracles.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod map;
pub mod psolver;
pub mod residual;
pub mod tensor;
pub mod variations;
pub mod verify;

pub use error::{Error, Result};
pub use grid::Grid;
pub use map::{DomainBox, Jet2, MapSpec};
pub use tensor::{Mat, Projector, Ten3, Tensor};
