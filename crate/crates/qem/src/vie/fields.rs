//! Scattered-field recovery from a VIE solution: bound currents and charges,
//! and the scattered E/H fields at exterior observation points.

use crate::constants::SI;
use crate::quad::{split_tet, tet_rule, tri_rule, TetRule};
use crate::{CVec3, Complex, Vec3};

use super::rhs::inside_any_tet;
use super::swg::SwgSpace;
use super::VieError;

/// Exclusion zone around tets for field evaluation, as a fraction of the
/// local element size.
const EXCLUSION_FRACTION: f64 = 0.1;

/// Solved D-field expansion coefficients (C/m^2 flux weights).
#[derive(Debug, Clone)]
pub struct VieSolution {
    pub coefficients: Vec<Complex>,
    /// Relative residual achieved by the solver.
    pub residual: f64,
}

impl VieSolution {
    /// Electric flux density `D(p)` inside tet `tet`.
    pub fn flux_density(&self, space: &SwgSpace, tet: usize, p: Vec3) -> CVec3 {
        let mut d = CVec3::zeros();
        for f in space.tet_faces(tet) {
            let b = space.basis_in_tet(f.unknown, tet, p);
            d += b.map(Complex::from) * self.coefficients[f.unknown];
        }
        d
    }

    /// Bound current density `J_b = j omega kappa D` inside tet `tet`
    /// (engineering convention).
    pub fn bound_current(&self, space: &SwgSpace, tet: usize, p: Vec3) -> CVec3 {
        let d = self.flux_density(space, tet, p);
        let jw_kappa = Complex::new(0.0, space.omega()) * space.kappa(tet);
        d.map(|z| z * jw_kappa)
    }

    /// Bound volume charge density `rho_b = -kappa div D` on tet `tet`
    /// (constant per tet).
    pub fn bound_volume_charge(&self, space: &SwgSpace, tet: usize) -> Complex {
        let mut div = Complex::from(0.0);
        for f in space.tet_faces(tet) {
            div += Complex::from(space.basis_divergence(f.unknown, tet))
                * self.coefficients[f.unknown];
        }
        -space.kappa(tet) * div
    }

    /// Bound surface charge density on the face of unknown `u` (from the
    /// contrast jump across the face).
    pub fn bound_face_charge(&self, space: &SwgSpace, u: usize) -> Complex {
        let unk = &space.unknowns()[u];
        let kp = space.kappa(unk.plus_tet);
        let km = unk.minus_tet.map(|t| space.kappa(t)).unwrap_or_else(|| Complex::from(0.0));
        -(km - kp) * self.coefficients[u]
    }
}

fn check_observation(space: &SwgSpace, p: Vec3) -> Result<(), VieError> {
    let mesh = space.mesh();
    if inside_any_tet(space, p) {
        return Err(VieError::ObservationTooClose { point: p, limit: 0.0 });
    }
    for t in 0..mesh.tet_count() {
        let verts = mesh.tet_vertices(t);
        let centroid = mesh.tet_centroid(t);
        let radius = verts.iter().map(|v| (v - centroid).norm()).fold(0.0f64, f64::max);
        if (p - centroid).norm() > 2.0 * radius {
            continue;
        }
        let h = max_edge(&verts);
        let limit = EXCLUSION_FRACTION * h;
        let mut d = f64::INFINITY;
        for v in &verts {
            d = d.min((p - v).norm());
        }
        const FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
        for f in FACES {
            let fc = (verts[f[0]] + verts[f[1]] + verts[f[2]]) / 3.0;
            d = d.min((p - fc).norm());
        }
        d = d.min((p - centroid).norm());
        if d < limit {
            return Err(VieError::ObservationTooClose { point: p, limit });
        }
    }
    Ok(())
}

fn max_edge(verts: &[Vec3; 4]) -> f64 {
    let mut h = 0.0f64;
    for i in 0..4 {
        for j in (i + 1)..4 {
            h = h.max((verts[i] - verts[j]).norm());
        }
    }
    h
}

/// grad_r g(r, y) for the engineering kernel.
#[inline]
fn grad_kernel(k0: f64, r: Vec3, y: Vec3) -> CVec3 {
    let d = r - y;
    let radius = d.norm();
    let g = Complex::from_polar(1.0 / (4.0 * std::f64::consts::PI * radius), -k0 * radius);
    let dg = g * Complex::new(-1.0 / radius, -k0);
    d.map(|c| Complex::from(c / radius) * dg)
}

#[inline]
fn kernel(k0: f64, r: Vec3, y: Vec3) -> Complex {
    let radius = (r - y).norm();
    Complex::from_polar(1.0 / (4.0 * std::f64::consts::PI * radius), -k0 * radius)
}

/// Observation-distance-adaptive iteration over quadrature points of a tet.
fn for_tet_points(
    verts: &[Vec3; 4],
    obs: Vec3,
    mut visit: impl FnMut(Vec3, f64),
) {
    let centroid = (verts[0] + verts[1] + verts[2] + verts[3]) * 0.25;
    let radius = verts.iter().map(|v| (v - centroid).norm()).fold(0.0f64, f64::max);
    let dist = (obs - centroid).norm();
    let (depth, rule) = if dist > 8.0 * radius {
        (0usize, tet_rule(4))
    } else if dist > 3.0 * radius {
        (0, tet_rule(11))
    } else if dist > 1.5 * radius {
        (1, tet_rule(11))
    } else {
        (2, tet_rule(11))
    };
    fn recurse(verts: &[Vec3; 4], depth: usize, rule: &TetRule, visit: &mut impl FnMut(Vec3, f64)) {
        if depth == 0 {
            let vol = ((verts[1] - verts[0])
                .cross(&(verts[2] - verts[0]))
                .dot(&(verts[3] - verts[0]))
                / 6.0)
                .abs();
            for (bc, w) in rule.points.iter().zip(rule.weights) {
                let p = verts[0] * bc[0] + verts[1] * bc[1] + verts[2] * bc[2] + verts[3] * bc[3];
                visit(p, w * vol);
            }
            return;
        }
        for child in split_tet(verts) {
            recurse(&child, depth - 1, rule, visit);
        }
    }
    recurse(verts, depth, &rule, &mut visit);
}

/// Scattered magnetic field `H^s(r) = int grad g x J_b dV` at an exterior
/// observation point (A/m, engineering convention).
pub fn scattered_h(space: &SwgSpace, sol: &VieSolution, r_obs: Vec3) -> Result<CVec3, VieError> {
    check_observation(space, r_obs)?;
    let mesh = space.mesh();
    let k0 = space.wavenumber();
    let mut h = CVec3::zeros();
    for t in 0..mesh.tet_count() {
        if space.kappa(t).norm() == 0.0 {
            continue;
        }
        let verts = mesh.tet_vertices(t);
        let jw_kappa = Complex::new(0.0, space.omega()) * space.kappa(t);
        // J_b is linear: accumulate grad g x (jwk D(p)) at quadrature points
        for_tet_points(&verts, r_obs, |p, w| {
            let mut d = CVec3::zeros();
            for f in space.tet_faces(t) {
                let b = space.basis_in_tet(f.unknown, t, p);
                d += b.map(Complex::from) * sol.coefficients[f.unknown];
            }
            let j = d.map(|z| z * jw_kappa * Complex::from(w));
            let g = grad_kernel(k0, r_obs, p);
            h += g.cross(&j);
        });
    }
    Ok(h)
}

/// Scattered electric field `E^s = -j omega A - grad phi` at an exterior
/// point (V/m, engineering convention).
pub fn scattered_e(space: &SwgSpace, sol: &VieSolution, r_obs: Vec3) -> Result<CVec3, VieError> {
    check_observation(space, r_obs)?;
    let mesh = space.mesh();
    let k0 = space.wavenumber();
    let jw_mu0 = Complex::new(0.0, space.omega() * SI.mu0);
    let inv_eps0 = 1.0 / SI.eps0;
    let mut e = CVec3::zeros();
    for t in 0..mesh.tet_count() {
        if space.kappa(t).norm() == 0.0 {
            continue;
        }
        let verts = mesh.tet_vertices(t);
        let jw_kappa = Complex::new(0.0, space.omega()) * space.kappa(t);
        let rho = sol.bound_volume_charge(space, t);
        for_tet_points(&verts, r_obs, |p, w| {
            let mut d = CVec3::zeros();
            for f in space.tet_faces(t) {
                let b = space.basis_in_tet(f.unknown, t, p);
                d += b.map(Complex::from) * sol.coefficients[f.unknown];
            }
            let j = d.map(|z| z * jw_kappa);
            let g = kernel(k0, r_obs, p);
            // -j omega mu0 int J g
            e -= j.map(|z| z * jw_mu0 * g * Complex::from(w));
            // -(1/eps0) int rho grad g (volume part)
            let gg = grad_kernel(k0, r_obs, p);
            e -= gg.map(|z| z * rho * Complex::from(inv_eps0 * w));
        });
    }
    // face charges from contrast jumps
    let rule = tri_rule(7);
    for (u, unk) in space.unknowns().iter().enumerate() {
        let sigma = sol.bound_face_charge(space, u);
        if sigma.norm() == 0.0 {
            continue;
        }
        let verts = [
            mesh.nodes()[unk.face[0]],
            mesh.nodes()[unk.face[1]],
            mesh.nodes()[unk.face[2]],
        ];
        for (bc, w) in rule.points.iter().zip(rule.weights) {
            let p = verts[0] * bc[0] + verts[1] * bc[1] + verts[2] * bc[2];
            let gg = grad_kernel(k0, r_obs, p);
            e -= gg.map(|z| z * sigma * Complex::from(inv_eps0 * w * unk.area));
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_box, Material};
    use crate::vie::{assemble, assemble_rhs, build_swg_space, factorize, solve, AssemblyOptions, RhsSource};
    use approx::assert_relative_eq;

    const OMEGA: f64 = 2.0 * std::f64::consts::PI * 2.87e9;

    fn solved_box() -> (SwgSpace, VieSolution) {
        let mesh =
            generate_box((90e-9, 90e-9, 45e-9), 45e-9, Material::silver_room()).unwrap();
        let space = build_swg_space(&mesh, OMEGA).unwrap();
        let mut sys = assemble(&space, &AssemblyOptions::default()).unwrap();
        factorize(&mut sys).unwrap();
        let src = RhsSource::MagneticDipole {
            position: Vec3::new(45e-9, 45e-9, 90e-9),
            moment: CVec3::new(Complex::from(0.0), Complex::from(0.0), Complex::from(1e-23)),
        };
        let rhs = assemble_rhs(&space, &src).unwrap();
        let sol = solve(&sys, &rhs).unwrap();
        (space, sol)
    }

    #[test]
    fn vacuum_solution_scatters_nothing() {
        let mesh = generate_box((90e-9, 90e-9, 45e-9), 45e-9, Material::vacuum()).unwrap();
        let space = build_swg_space(&mesh, OMEGA).unwrap();
        let sol = VieSolution {
            coefficients: vec![Complex::new(1.0, -0.5); space.unknown_count()],
            residual: 0.0,
        };
        let p = Vec3::new(45e-9, 45e-9, 120e-9);
        assert_eq!(scattered_h(&space, &sol, p).unwrap(), CVec3::zeros());
        assert_eq!(scattered_e(&space, &sol, p).unwrap(), CVec3::zeros());
    }

    #[test]
    fn fields_linear_in_coefficients() {
        let (space, sol) = solved_box();
        let p = Vec3::new(10e-9, 20e-9, 130e-9);
        let h1 = scattered_h(&space, &sol, p).unwrap();
        let doubled = VieSolution {
            coefficients: sol.coefficients.iter().map(|c| c * Complex::from(2.0)).collect(),
            residual: sol.residual,
        };
        let h2 = scattered_h(&space, &doubled, p).unwrap();
        for k in 0..3 {
            assert_relative_eq!(h2[k].re, 2.0 * h1[k].re, max_relative = 1e-12);
            assert_relative_eq!(h2[k].im, 2.0 * h1[k].im, max_relative = 1e-12);
        }
    }

    #[test]
    fn observation_inside_or_near_rejected() {
        let (space, sol) = solved_box();
        assert!(matches!(
            scattered_h(&space, &sol, Vec3::new(45e-9, 45e-9, 20e-9)),
            Err(VieError::ObservationTooClose { .. })
        ));
        // just off the top face, inside the exclusion zone
        assert!(matches!(
            scattered_h(&space, &sol, Vec3::new(45e-9, 45e-9, 45.5e-9)),
            Err(VieError::ObservationTooClose { .. })
        ));
    }

    #[test]
    fn h_matches_curl_of_e() {
        // H^s = -(1 / j omega mu0) curl E^s, curl by central differences.
        // Off-axis observation keeps all components comparable, and the
        // point sits far enough that every tet uses the same quadrature
        // depth for p and p +/- step (the adaptive-depth switch would
        // otherwise contaminate the finite differences).
        let (space, sol) = solved_box();
        let p = Vec3::new(150e-9, 120e-9, 400e-9);
        let h_direct = scattered_h(&space, &sol, p).unwrap();
        // small step: truncation error on the large curl-free electrostatic
        // part of E must stay below the small real curl-carrying part
        let step = 1e-10;
        let mut curl = CVec3::zeros();
        for axis in 0..3 {
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            let mut pp = p;
            let mut pm = p;
            pp[a] += step;
            pm[a] -= step;
            let d_eb = (scattered_e(&space, &sol, pp).unwrap()[b]
                - scattered_e(&space, &sol, pm).unwrap()[b])
                / Complex::from(2.0 * step);
            let mut qp = p;
            let mut qm = p;
            qp[b] += step;
            qm[b] -= step;
            let d_ea = (scattered_e(&space, &sol, qp).unwrap()[a]
                - scattered_e(&space, &sol, qm).unwrap()[a])
                / Complex::from(2.0 * step);
            curl[axis] = d_eb - d_ea;
        }
        let expected = curl.map(|z| z / Complex::new(0.0, -OMEGA * SI.mu0));
        let scale = (0..3).map(|k| h_direct[k].norm()).fold(0.0f64, f64::max);
        for k in 0..3 {
            assert_relative_eq!(
                h_direct[k].re,
                expected[k].re,
                max_relative = 1e-3,
                epsilon = 1e-3 * scale
            );
            assert_relative_eq!(
                h_direct[k].im,
                expected[k].im,
                max_relative = 1e-3,
                epsilon = 1e-3 * scale
            );
        }
    }
}
