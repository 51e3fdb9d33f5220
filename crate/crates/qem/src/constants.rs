//! Physical constants (CODATA 2018), compiled in.

/// CODATA 2018 physical constants in SI units.
///
/// `SPEED_OF_LIGHT` and `BOLTZMANN` are exact by the 2019 SI redefinition;
/// `MU0`/`EPS0` carry the 2018 measured values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Vacuum permeability mu_0, H/m.
    pub mu0: f64,
    /// Vacuum permittivity eps_0, F/m.
    pub eps0: f64,
    /// Reduced Planck constant hbar, J s.
    pub hbar: f64,
    /// Boltzmann constant k_B, J/K.
    pub kb: f64,
    /// Bohr magneton mu_B, J/T.
    pub mu_bohr: f64,
}

/// Speed of light in vacuum (exact), m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permeability (CODATA 2018), H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity (CODATA 2018), F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Reduced Planck constant (exact h / 2 pi), J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (exact), J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Bohr magneton (CODATA 2018), J/T.
pub const MU_BOHR: f64 = 9.274_010_078_3e-24;

/// The single compiled-in constant set used by the whole crate.
pub const SI: PhysicalConstants = PhysicalConstants {
    c: SPEED_OF_LIGHT,
    mu0: MU0,
    eps0: EPS0,
    hbar: HBAR,
    kb: BOLTZMANN,
    mu_bohr: MU_BOHR,
};

impl PhysicalConstants {
    /// Free-space wavenumber k_0 = omega / c, rad/m.
    #[inline]
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega / self.c
    }
}
