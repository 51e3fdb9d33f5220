//! Free-space kernels: scalar Green's function, its gradient, magnetic-dipole
//! incident fields, and the coincident-point free-space magnetic Green tensor.
//!
//! Everything here is in the engineering `e^{+j omega t}` convention, with
//! `g(r, r') = e^{-j k0 R} / (4 pi R)`; see [`crate::convention`].

use std::f64::consts::PI;

use thiserror::Error;

use crate::constants::SI;
use crate::{CVec3, Complex, Mat3, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("coincident source and observation points (singular kernel)")]
    CoincidentPoints,
    #[error("frequency must be > 0, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("wavenumber must be >= 0, got {0} rad/m")]
    NegativeWavenumber(f64),
}

/// Scalar Green's function `e^{-j k0 R} / (4 pi R)`, engineering convention.
pub fn scalar_green(r: Vec3, rp: Vec3, k0: f64) -> Result<Complex, KernelError> {
    if k0 < 0.0 {
        return Err(KernelError::NegativeWavenumber(k0));
    }
    let d = r - rp;
    let radius = d.norm();
    if radius == 0.0 {
        return Err(KernelError::CoincidentPoints);
    }
    Ok(Complex::from_polar(1.0 / (4.0 * PI * radius), -k0 * radius))
}

/// Gradient of [`scalar_green`] with respect to the observation point `r`.
///
/// Equals minus the gradient with respect to `rp`.
pub fn grad_scalar_green(r: Vec3, rp: Vec3, k0: f64) -> Result<CVec3, KernelError> {
    if k0 < 0.0 {
        return Err(KernelError::NegativeWavenumber(k0));
    }
    let d = r - rp;
    let radius = d.norm();
    if radius == 0.0 {
        return Err(KernelError::CoincidentPoints);
    }
    let g = Complex::from_polar(1.0 / (4.0 * PI * radius), -k0 * radius);
    // dg/dR = g (-j k0 - 1/R); grad = (r - rp)/R dg/dR
    let dg_dr = g * Complex::new(-1.0 / radius, -k0);
    Ok(d.map(|x| Complex::from(x / radius) * dg_dr))
}

/// Free-space electric field of a point magnetic dipole `m` (J/T) at `r_src`,
/// observed at `r_obs`:
///
/// `E(r) = -j omega mu0 grad g(r, r_src) x m`.
///
/// The overall sign is fixed by reciprocity of the resulting magnetic Green
/// tensor together with free-space passivity (checked in the test suite).
pub fn incident_e_magnetic_dipole(
    r_obs: Vec3,
    r_src: Vec3,
    moment: &CVec3,
    omega: f64,
) -> Result<CVec3, KernelError> {
    if omega <= 0.0 {
        return Err(KernelError::NonPositiveFrequency(omega));
    }
    let k0 = SI.wavenumber(omega);
    let grad = grad_scalar_green(r_obs, r_src, k0)?;
    let jwmu = Complex::new(0.0, -omega * SI.mu0);
    Ok(grad.cross(moment).map(|z| jwmu * z))
}

/// Free-space magnetic field of a point magnetic dipole, engineering
/// convention. Used as an independent oracle for the incident-field curl
/// relation and the point-response sphere model.
pub fn h_magnetic_dipole(
    r_obs: Vec3,
    r_src: Vec3,
    moment: &CVec3,
    omega: f64,
) -> Result<CVec3, KernelError> {
    if omega <= 0.0 {
        return Err(KernelError::NonPositiveFrequency(omega));
    }
    let k0 = SI.wavenumber(omega);
    let g0 = free_space_gm(r_obs, r_src, k0)?;
    Ok(g0.map(|z| z * Complex::from(k0 * k0)) * moment)
}

/// Full free-space magnetic dyadic Green tensor `G_m^0(r, r')`, engineering
/// convention, such that `H = k0^2 G_m^0 m` for a magnetic dipole `m`.
///
/// `G_m^0 = g(R) [ (1 + (jk0R - 1)/(k0R)^2 ... ) ]` in the standard
/// near/intermediate/far decomposition; the engineering form carries
/// `e^{-j k0 R}` phases.
pub fn free_space_gm(r: Vec3, rp: Vec3, k0: f64) -> Result<nalgebra::Matrix3<Complex>, KernelError> {
    if k0 <= 0.0 {
        // G_m^0 itself diverges as 1/k0^2 in the static limit; callers that
        // want static dipole fields multiply by k0^2 first.
        return Err(KernelError::NonPositiveFrequency(k0));
    }
    let d = r - rp;
    let radius = d.norm();
    if radius == 0.0 {
        return Err(KernelError::CoincidentPoints);
    }
    let rhat = d / radius;
    let g = Complex::from_polar(1.0 / (4.0 * PI * radius), -k0 * radius);
    // Standard dipole dyadic with physics phase x = i k R; substituting the
    // engineering phase x = -j k0 R keeps the algebra identical.
    let x = Complex::new(0.0, -k0 * radius);
    let kr2 = Complex::from((k0 * radius).powi(2));
    let a = Complex::from(1.0) + (x - Complex::from(1.0)) / kr2;
    let b = (Complex::from(3.0) - Complex::from(3.0) * x + x * x) / kr2;
    let mut out = nalgebra::Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut v = b * Complex::from(rhat[i] * rhat[j]);
            if i == j {
                v += a;
            }
            out[(i, j)] = g * v;
        }
    }
    Ok(out)
}

/// Imaginary part of the coincident-point free-space magnetic Green tensor,
/// physics convention: `(omega / 6 pi c) I`. Positive semidefinite; linear
/// in omega.
pub fn free_space_gm_im(omega: f64) -> Mat3 {
    Mat3::identity() * (omega / (6.0 * PI * SI.c))
}
