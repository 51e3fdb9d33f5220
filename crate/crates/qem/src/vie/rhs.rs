//! Right-hand-side assembly: incident fields tested against SWG functions.

use crate::freespace::incident_e_magnetic_dipole;
use crate::mesh::point_in_tet;
use crate::quad::{split_tet, tet_rule, TetRule};
use crate::{CVec3, Complex, Vec3};

use super::swg::SwgSpace;
use super::VieError;

/// Incident-field source for [`assemble_rhs`].
#[derive(Debug, Clone)]
pub enum RhsSource {
    /// Point magnetic dipole (J/T) outside the mesh, radiating at the
    /// space's frequency.
    MagneticDipole { position: Vec3, moment: CVec3 },
    /// Spatially uniform electric field (V/m), mostly for tests.
    UniformE(CVec3),
}

/// Test the incident field against every SWG function:
/// `v_m = int f_m . E^i` over the support of `f_m`.
pub fn assemble_rhs(space: &SwgSpace, source: &RhsSource) -> Result<Vec<Complex>, VieError> {
    let mesh = space.mesh();
    if let RhsSource::MagneticDipole { position, .. } = source {
        if mesh.contains_point(*position) {
            return Err(VieError::SourceInsideMesh(*position));
        }
    }
    let omega = space.omega();
    let mut rhs = vec![Complex::from(0.0); space.unknown_count()];
    let base_rule = tet_rule(4);
    let near_rule = tet_rule(11);

    for t in 0..mesh.tet_count() {
        let verts = mesh.tet_vertices(t);
        let centroid = mesh.tet_centroid(t);
        let radius = verts.iter().map(|v| (v - centroid).norm()).fold(0.0f64, f64::max);
        // moments of the incident field over the tet: S_e = int E,
        // S_re = int (r . E)
        let (s_e, s_re) = match source {
            RhsSource::UniformE(e) => {
                let vol = mesh.tet_volume(t);
                let s_e = e.map(|z| z * Complex::from(vol));
                let dot = centroid.x * e.x + centroid.y * e.y + centroid.z * e.z;
                (s_e, dot * Complex::from(vol))
            }
            RhsSource::MagneticDipole { position, moment } => {
                // subdivision depth by proximity of the dipole
                let d = (position - centroid).norm();
                let (depth, rule) = if d > 8.0 * radius {
                    (0, &base_rule)
                } else if d > 4.0 * radius {
                    (0, &near_rule)
                } else if d > 2.0 * radius {
                    (1, &near_rule)
                } else {
                    (2, &near_rule)
                };
                field_moments_subdivided(&verts, depth, rule, &mut |p| {
                    incident_e_magnetic_dipole(p, *position, moment, omega)
                        .expect("dipole outside mesh, omega > 0")
                })
            }
        };
        for f in space.tet_faces(t) {
            let vol = mesh.tet_volume(t);
            let c = f.sign * f.area / (3.0 * vol);
            let v_free = mesh.nodes()[f.free_vertex];
            let dot_v = s_e.x * Complex::from(v_free.x)
                + s_e.y * Complex::from(v_free.y)
                + s_e.z * Complex::from(v_free.z);
            rhs[f.unknown] += Complex::from(c) * (s_re - dot_v);
        }
    }
    Ok(rhs)
}

/// `int E dV` and `int (r . E) dV` over a tet with recursive midpoint
/// subdivision (for sources close to the element).
fn field_moments_subdivided(
    verts: &[Vec3; 4],
    depth: usize,
    rule: &TetRule,
    field: &mut impl FnMut(Vec3) -> CVec3,
) -> (CVec3, Complex) {
    if depth == 0 {
        let vol = ((verts[1] - verts[0]).cross(&(verts[2] - verts[0])).dot(&(verts[3] - verts[0]))
            / 6.0)
            .abs();
        let mut s_e = CVec3::zeros();
        let mut s_re = Complex::from(0.0);
        for (bc, w) in rule.points.iter().zip(rule.weights) {
            let p = verts[0] * bc[0] + verts[1] * bc[1] + verts[2] * bc[2] + verts[3] * bc[3];
            let e = field(p);
            let wv = w * vol;
            s_e += e.map(|z| z * Complex::from(wv));
            s_re += (e.x * Complex::from(p.x) + e.y * Complex::from(p.y)
                + e.z * Complex::from(p.z))
                * Complex::from(wv);
        }
        return (s_e, s_re);
    }
    let mut s_e = CVec3::zeros();
    let mut s_re = Complex::from(0.0);
    for child in split_tet(verts) {
        let (ce, cre) = field_moments_subdivided(&child, depth - 1, rule, field);
        s_e += ce;
        s_re += cre;
    }
    (s_e, s_re)
}

/// True if `p` lies inside tet `t` of the space's mesh (exposed for
/// observation-point checks in fields evaluation).
pub(super) fn inside_any_tet(space: &SwgSpace, p: Vec3) -> bool {
    let mesh = space.mesh();
    (0..mesh.tet_count()).any(|t| point_in_tet(&mesh.tet_vertices(t), p, -1e-12))
}
