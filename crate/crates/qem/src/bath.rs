//! Electromagnetic bath description and photon statistics.

use thiserror::Error;

use crate::constants::SI;

#[derive(Debug, Error, PartialEq)]
pub enum BathError {
    #[error("mean photon number requires omega > 0, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("bath temperature must be >= 0 K, got {0}")]
    NegativeTemperature(f64),
    #[error("dephasing cutoff must be > 0 rad/s, got {0}")]
    NonPositiveCutoff(f64),
}

/// Thermal electromagnetic bath: temperature and dephasing-integral cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// Bath temperature T_em, kelvin (>= 0).
    pub temperature: f64,
    /// Dephasing cutoff frequency omega_c, rad/s (> 0).
    pub dephasing_cutoff: f64,
}

impl BathSpec {
    /// Default dephasing cutoff, 2 pi x 10 MHz. The dephasing integral is
    /// dominated by MHz frequencies; the cutoff only needs to sit above them.
    pub const DEFAULT_CUTOFF: f64 = 2.0 * std::f64::consts::PI * 1.0e7;

    pub fn new(temperature: f64, dephasing_cutoff: f64) -> Result<Self, BathError> {
        if temperature < 0.0 {
            return Err(BathError::NegativeTemperature(temperature));
        }
        if dephasing_cutoff <= 0.0 {
            return Err(BathError::NonPositiveCutoff(dephasing_cutoff));
        }
        Ok(Self { temperature, dephasing_cutoff })
    }

    /// Zero-temperature bath with the default cutoff.
    pub fn zero_temperature() -> Self {
        Self { temperature: 0.0, dephasing_cutoff: Self::DEFAULT_CUTOFF }
    }

    /// Mean photon number at `omega` for this bath.
    pub fn mean_photon_number(&self, omega: f64) -> Result<f64, BathError> {
        mean_photon_number(omega, self.temperature)
    }
}

/// Bose-Einstein occupation `1 / (e^{hbar omega / k_B T} - 1)`.
///
/// Returns 0 for `T = 0`. Errors for `omega <= 0`, where the factor diverges
/// or is undefined.
pub fn mean_photon_number(omega: f64, temperature: f64) -> Result<f64, BathError> {
    if omega <= 0.0 {
        return Err(BathError::NonPositiveFrequency(omega));
    }
    if temperature < 0.0 {
        return Err(BathError::NegativeTemperature(temperature));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = SI.hbar * omega / (SI.kb * temperature);
    // exp_m1 keeps precision for hbar omega << k_B T; for large x the result
    // underflows cleanly to 0.
    Ok(1.0 / x.exp_m1())
}
