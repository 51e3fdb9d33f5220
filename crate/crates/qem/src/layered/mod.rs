//! Analytic reflected magnetic dyadic Green's function above a planar lossy
//! film, via Fresnel coefficients and in-plane momentum integration.
//!
//! Serves as the thin-film baseline and as an independent oracle for the
//! volume-integral-equation backend.

mod bessel;
mod fresnel;
mod green;

pub use bessel::{bessel_j0, bessel_j1, bessel_j2};
pub use fresnel::{fresnel_slab, FresnelCoefficients};
pub use green::{reflected_gm_layered, QuadControl};

use thiserror::Error;

use crate::mesh::Material;
use crate::quad::QuadError;

#[derive(Debug, Error)]
pub enum LayeredError {
    #[error("observation points must satisfy z > 0, got z_i = {zi}, z_j = {zj}")]
    PointBelowSurface { zi: f64, zj: f64 },
    #[error("frequency must be > 0, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("film thickness must be > 0 (or infinite), got {0}")]
    BadThickness(f64),
    #[error("momentum integral did not converge: {0}")]
    Quadrature(#[from] QuadError),
}

/// Vacuum / film / vacuum stack. The film occupies `z in [-t, 0]`;
/// observation points live in the upper half-space `z > 0`.
#[derive(Debug, Clone)]
pub struct LayeredStack {
    /// Film thickness, meters; `f64::INFINITY` for a half-space.
    pub thickness: f64,
    pub film: Material,
}

impl LayeredStack {
    pub fn new(thickness: f64, film: Material) -> Result<Self, LayeredError> {
        if !(thickness > 0.0) {
            return Err(LayeredError::BadThickness(thickness));
        }
        Ok(Self { thickness, film })
    }

    /// Half-space of the given material.
    pub fn half_space(film: Material) -> Self {
        Self { thickness: f64::INFINITY, film }
    }
}
