//! Reflected magnetic dyadic Green's function above a planar film.
//!
//! The 2-D in-plane momentum integral is reduced to a radial integral with
//! analytic angular parts (Bessel functions J0, J1, J2). The radial path is
//! split at q = k0: the propagating segment is parametrized by q = k0 sin
//! theta and the evanescent segment by kappa = -j k_z, which removes the
//! 1/k_z endpoint singularity on both sides. Internally everything is
//! engineering convention; the returned tensor is physics convention
//! (`Im G >= 0` encodes loss at coincident points).

use std::f64::consts::PI;

use crate::constants::SI;
use crate::quad::{adaptive_gk, AdaptiveOptions};
use crate::{CMat3, Complex, Vec3};

use super::fresnel::fresnel_slab;
use super::{LayeredError, LayeredStack};
use super::bessel::{bessel_j0, bessel_j1, bessel_j2};

/// Radial-quadrature control for [`reflected_gm_layered`].
#[derive(Debug, Clone, Copy)]
pub struct QuadControl {
    /// Relative tolerance per radial segment.
    pub rel_tol: f64,
    /// Max adaptive intervals per segment.
    pub max_intervals: usize,
}

impl Default for QuadControl {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_intervals: 4000 }
    }
}

/// Angular-integrated polarization sum at radial momentum `q`:
/// `r_pp P + (r_ss / k0^2) S` with the angular integrals folded into
/// J0/J1/J2 factors. `kz` is the vacuum k_z on the engineering branch.
fn polarization_sum(
    q: f64,
    kz: Complex,
    k0: f64,
    d: f64,
    alpha: f64,
    omega: f64,
    stack: &LayeredStack,
) -> CMat3 {
    let fres = fresnel_slab(q, omega, stack);
    let qd = q * d;
    let j0 = bessel_j0(qd);
    let j1 = bessel_j1(qd);
    let j2 = bessel_j2(qd);
    let (s2a, c2a) = (2.0 * alpha).sin_cos();
    let (sa, ca) = alpha.sin_cos();

    let mut m = CMat3::zeros();
    // p-polarized block (in-plane only)
    let rp = fres.r_pp * Complex::from(PI);
    m[(0, 0)] += rp * Complex::from(j0 + j2 * c2a);
    m[(0, 1)] += rp * Complex::from(j2 * s2a);
    m[(1, 0)] += rp * Complex::from(j2 * s2a);
    m[(1, 1)] += rp * Complex::from(j0 - j2 * c2a);

    // s-polarized block
    let ws = fres.r_ss / Complex::from(k0 * k0);
    let kz2 = kz * kz;
    let two_pi_i_qkz = Complex::new(0.0, 2.0 * PI) * Complex::from(q) * kz;
    m[(0, 0)] += ws * -kz2 * Complex::from(PI * (j0 - j2 * c2a));
    m[(0, 1)] += ws * kz2 * Complex::from(PI * j2 * s2a);
    m[(1, 0)] += ws * kz2 * Complex::from(PI * j2 * s2a);
    m[(1, 1)] += ws * -kz2 * Complex::from(PI * (j0 + j2 * c2a));
    m[(0, 2)] += ws * two_pi_i_qkz * Complex::from(j1 * ca);
    m[(1, 2)] += ws * two_pi_i_qkz * Complex::from(j1 * sa);
    m[(2, 0)] -= ws * two_pi_i_qkz * Complex::from(j1 * ca);
    m[(2, 1)] -= ws * two_pi_i_qkz * Complex::from(j1 * sa);
    m[(2, 2)] += ws * Complex::from(2.0 * PI * q * q * j0);
    m
}

/// Reflected magnetic dyadic Green tensor `G_m^r(r_i, r_j, omega)` above the
/// stack, physics convention, units 1/m.
pub fn reflected_gm_layered(
    r_i: Vec3,
    r_j: Vec3,
    omega: f64,
    stack: &LayeredStack,
    quad: &QuadControl,
) -> Result<CMat3, LayeredError> {
    if omega <= 0.0 {
        return Err(LayeredError::NonPositiveFrequency(omega));
    }
    if r_i.z <= 0.0 || r_j.z <= 0.0 {
        return Err(LayeredError::PointBelowSurface { zi: r_i.z, zj: r_j.z });
    }
    let k0 = SI.wavenumber(omega);
    let zsum = r_i.z + r_j.z;
    let dx = r_i.x - r_j.x;
    let dy = r_i.y - r_j.y;
    let d = dx.hypot(dy);
    let alpha = dy.atan2(dx);

    let opts = AdaptiveOptions {
        rel_tol: quad.rel_tol,
        abs_tol: 0.0,
        max_intervals: quad.max_intervals,
    };
    let prefactor = Complex::new(0.0, -1.0 / (8.0 * PI * PI));

    // Propagating segment: q = k0 sin(theta), k_z = k0 cos(theta),
    // q dq / k_z = k0 sin(theta) d(theta).
    let (prop, _) = adaptive_gk(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            let q = k0 * s;
            let kz = Complex::from(k0 * c);
            let phase = (Complex::new(0.0, -zsum) * kz).exp();
            let m = polarization_sum(q, kz, k0, d, alpha, omega, stack);
            m.map(|v| v * prefactor * Complex::from(k0 * s) * phase)
        },
        0.0,
        PI / 2.0,
        &opts,
    )?;

    // Evanescent segment: k_z = -j kappa, q = sqrt(k0^2 + kappa^2),
    // q dq / k_z = j d(kappa); the e^{-j k_z Z} factor becomes e^{-kappa Z},
    // bounded above by e^{-60} at the cutoff.
    let q_max = (60.0 / zsum).max(50.0 * k0);
    let kappa_max = (q_max * q_max - k0 * k0).max(0.0).sqrt();
    let (evan, _) = adaptive_gk(
        |kappa: f64| {
            let q = k0.hypot(kappa);
            let kz = Complex::new(0.0, -kappa);
            let damp = (-kappa * zsum).exp();
            let m = polarization_sum(q, kz, k0, d, alpha, omega, stack);
            // prefactor * (j d kappa) = (1 / 8 pi^2) d kappa
            m.map(|v| v * Complex::from(damp / (8.0 * PI * PI)))
        },
        0.0,
        kappa_max,
        &opts,
    )?;

    let engineering = prop + evan;
    // physics convention: conjugate
    Ok(engineering.map(|z| z.conj()))
}
