//! Sub-Riemannian geodesics on SO(3) and their use for tracking lines in
//! spherical images of the retina.

pub mod error;
pub mod cost;
pub mod eikonal;
pub mod geodesics;
pub mod lie_so3;
pub mod optics;
pub mod quadrature;
pub mod registry;
pub mod tracking;

pub use error::{Error, Result};
