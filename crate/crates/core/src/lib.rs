//! Numerical inverse curvature flows of starshaped hypersurfaces in ℝⁿ⁺¹,
//! written as graphs over the unit sphere, together with roundness and
//! pinching diagnostics.

pub mod curvature;
pub mod error;
pub mod flow;
pub mod hypersurface;
pub mod invariants;
pub mod roundness;
pub mod sphere;

pub use error::{Error, Result};
