//! Discrete laboratory for linear and nonlinear Hodge-Frobenius equations on 2D grids.
//!
//! - [`density`]: mass-density families ρ(Q) and their scalar diagnostics.
//! - [`dec`]: discrete exterior calculus on uniform rectilinear grids.
//! - [`homotopy`]: the radial homotopy operator and recursive-form decomposition.
//! - [`solver`]: the weighted variational equation `δ[ρ(Q)e^{2η}du] = 0`.
//! - [`backlund`]: density duality and eikonal Bäcklund transforms.
//! - [`analysis`]: mean-value, singularity and Γ-smallness monitors.
//! - [`verify`]: the end-to-end check suite used by the CLI and the acceptance tests.

pub mod analysis;
pub mod backlund;
pub mod dec;
pub mod density;
pub mod error;
pub mod fields;
pub mod homotopy;
pub mod io;
pub mod linalg;
pub mod quad;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
