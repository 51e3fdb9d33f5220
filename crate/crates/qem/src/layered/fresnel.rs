//! Fresnel reflection coefficients of a vacuum/film/vacuum slab,
//! engineering convention.

use crate::constants::SI;
use crate::Complex;

use super::LayeredStack;

/// Reflection coefficients at one (q, omega). For the isotropic nonmagnetic
/// film the cross terms r_sp, r_ps vanish identically; they are kept in the
/// data path so anisotropic stacks can slot in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelCoefficients {
    pub r_ss: Complex,
    pub r_pp: Complex,
    pub r_sp: Complex,
    pub r_ps: Complex,
}

/// Complex square root on the branch with nonpositive imaginary part
/// (engineering convention: evanescent and lossy waves decay as
/// `e^{-j k_z z}` for z -> +inf).
pub(crate) fn kz_branch(z: Complex) -> Complex {
    let w = z.sqrt();
    if w.im > 0.0 {
        -w
    } else {
        w
    }
}

/// Slab Fresnel coefficients at in-plane momentum `q` (rad/m) and angular
/// frequency `omega` (rad/s).
pub fn fresnel_slab(q: f64, omega: f64, stack: &LayeredStack) -> FresnelCoefficients {
    let k0 = SI.wavenumber(omega);
    let eps_eff = stack.film.complex_permittivity(omega) / Complex::from(SI.eps0);
    let kz0 = kz_branch(Complex::from(k0 * k0 - q * q));
    let kzm = kz_branch(Complex::from(k0 * k0) * eps_eff - Complex::from(q * q));

    // vacuum -> film interface coefficients
    let r01_s = (kz0 - kzm) / (kz0 + kzm);
    let r01_p = (eps_eff * kz0 - kzm) / (eps_eff * kz0 + kzm);

    let (r_ss, r_pp) = if stack.thickness.is_infinite() {
        (r01_s, r01_p)
    } else {
        // vacuum below: r12 = -r01 for both polarizations, so
        // r = r01 (1 - ph) / (1 - r01^2 ph), ph = e^{-2 j kzm t}.
        let ph = (Complex::new(0.0, -2.0 * stack.thickness) * kzm).exp();
        let one = Complex::from(1.0);
        (
            r01_s * (one - ph) / (one - r01_s * r01_s * ph),
            r01_p * (one - ph) / (one - r01_p * r01_p * ph),
        )
    };
    FresnelCoefficients { r_ss, r_pp, r_sp: Complex::from(0.0), r_ps: Complex::from(0.0) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Material;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const OMEGA: f64 = 2.0 * std::f64::consts::PI * 18.0e9;

    #[test]
    fn no_contrast_gives_zero() {
        let stack = LayeredStack::new(125e-9, Material::vacuum()).unwrap();
        for q in [0.0, 100.0, 1e6, 1e9] {
            let f = fresnel_slab(q, OMEGA, &stack);
            assert_abs_diff_eq!(f.r_ss.norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(f.r_pp.norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn vanishing_film_gives_zero() {
        let mat = Material::aluminum_cryo();
        for t in [1e-12, 1e-14, 1e-16] {
            let stack = LayeredStack::new(t, mat.clone()).unwrap();
            let f = fresnel_slab(1e7, OMEGA, &stack);
            assert!(f.r_ss.norm() < 1e-2 * t / 1e-12, "r_ss {} at t {}", f.r_ss.norm(), t);
        }
    }

    #[test]
    fn perfect_conductor_limit() {
        let mat = Material::new("pec-ish", 1e12, 1.0).unwrap();
        let stack = LayeredStack::new(125e-9, mat).unwrap();
        let f = fresnel_slab(0.0, OMEGA, &stack);
        assert_relative_eq!(f.r_ss.re, -1.0, epsilon = 1e-3);
        assert!(f.r_ss.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn propagating_incidence_is_passive() {
        let stack = LayeredStack::new(125e-9, Material::aluminum_cryo()).unwrap();
        let k0 = crate::constants::SI.wavenumber(OMEGA);
        for frac in [0.0, 0.3, 0.7, 0.99] {
            let f = fresnel_slab(frac * k0, OMEGA, &stack);
            assert!(f.r_ss.norm() <= 1.0 + 1e-12);
            assert!(f.r_pp.norm() <= 1.0 + 1e-12);
            assert_eq!(f.r_sp, Complex::from(0.0));
            assert_eq!(f.r_ps, Complex::from(0.0));
        }
    }

    #[test]
    fn half_space_matches_thick_slab() {
        let mat = Material::aluminum_cryo();
        let half = LayeredStack::half_space(mat.clone());
        let thick = LayeredStack::new(0.1, mat).unwrap(); // 10 cm >> skin depth
        for q in [1e5, 1e7, 1e8] {
            let a = fresnel_slab(q, OMEGA, &half);
            let b = fresnel_slab(q, OMEGA, &thick);
            assert_relative_eq!(a.r_ss.re, b.r_ss.re, max_relative = 1e-10);
            assert_relative_eq!(a.r_ss.im, b.r_ss.im, max_relative = 1e-10);
        }
    }

    #[test]
    fn engineering_loss_sign() {
        // lossy film: Im r <= 0 in engineering convention for evanescent q
        let stack = LayeredStack::new(125e-9, Material::aluminum_cryo()).unwrap();
        for q in [1e6, 1e7, 1e8, 1e9] {
            let f = fresnel_slab(q, OMEGA, &stack);
            assert!(f.r_ss.im <= 1e-15, "Im r_ss = {} at q = {q}", f.r_ss.im);
        }
    }
}
