//! Lossy nonmagnetic material model: frequency-independent DC conductivity
//! plus a real relative permittivity.

use crate::constants::SI;
use crate::Complex;

use super::MeshError;

/// Isotropic nonmagnetic material with complex permittivity
/// `eps_m(omega) = eps0 eps_r + sigma / (j omega)` (engineering convention,
/// nonpositive imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// DC conductivity sigma, S/m (>= 0).
    pub conductivity: f64,
    /// Real relative permittivity eps_r (>= 1).
    pub relative_permittivity: f64,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        conductivity: f64,
        relative_permittivity: f64,
    ) -> Result<Self, MeshError> {
        if !(conductivity >= 0.0) {
            return Err(MeshError::InvalidMaterial(format!(
                "conductivity must be >= 0 S/m, got {conductivity}"
            )));
        }
        if !(relative_permittivity >= 1.0) {
            return Err(MeshError::InvalidMaterial(format!(
                "relative permittivity must be >= 1, got {relative_permittivity}"
            )));
        }
        Ok(Self { name: name.into(), conductivity, relative_permittivity })
    }

    /// Vacuum placeholder (zero contrast).
    pub fn vacuum() -> Self {
        Self { name: "vacuum".into(), conductivity: 0.0, relative_permittivity: 1.0 }
    }

    /// Aluminum at cryogenic temperature (sigma = 1.6e8 S/m).
    pub fn aluminum_cryo() -> Self {
        Self { name: "Al (cryo)".into(), conductivity: 1.6e8, relative_permittivity: 1.0 }
    }

    /// Silver at room temperature (sigma = 5e7 S/m).
    pub fn silver_room() -> Self {
        Self { name: "Ag".into(), conductivity: 5.0e7, relative_permittivity: 1.0 }
    }

    /// Complex permittivity at `omega`, engineering convention (F/m).
    pub fn complex_permittivity(&self, omega: f64) -> Complex {
        Complex::new(SI.eps0 * self.relative_permittivity, -self.conductivity / omega)
    }

    /// Contrast ratio `kappa = (eps_m - eps0) / eps_m`.
    pub fn contrast(&self, omega: f64) -> Complex {
        let eps_m = self.complex_permittivity(omega);
        (eps_m - Complex::from(SI.eps0)) / eps_m
    }

    /// Zero-contrast materials generate no equivalent sources.
    pub fn is_vacuum_like(&self) -> bool {
        self.conductivity == 0.0 && self.relative_permittivity == 1.0
    }
}
