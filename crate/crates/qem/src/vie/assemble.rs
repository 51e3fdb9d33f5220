//! Galerkin assembly of the D-field volume integral equation.
//!
//! Entry structure (engineering convention):
//!
//! ```text
//! A[m][n] = sum_T int_T f_m . f_n / eps_T                      (exact)
//!         - mu0 w^2 sum_{P,Q} kappa_Q int_P int_Q f_m . f_n g
//!         + (1/eps0) sum_{a,b} c_a c_b int_a int_b g           (charges)
//! ```
//!
//! Test charges of unknown m: `div f_m` on its support tets plus a `-1`
//! surface density on boundary faces (from integrating the tested gradient
//! kernel by parts). Source charges of unknown n: `kappa div f_n` on
//! volumes plus the contrast jump on the face itself.
//!
//! Singular and near pairs use singularity subtraction: the static
//! `1/(4 pi R)` inner integrals are analytic ([`super::singular`]), the
//! smooth remainder `(e^{-j k0 R} - 1)/(4 pi R)` is regular quadrature.
//! Every kernel double integral is evaluated in one canonical orientation
//! per unordered object pair, so the assembled matrix is complex-symmetric
//! to rounding for uniform contrast, independent of thread count (each
//! matrix column is owned by one worker; no shared accumulators).

use rayon::prelude::*;

use crate::constants::SI;
use crate::quad::{tet_rule, tri_rule};
use crate::{CVec3, Complex, Vec3};

use super::singular::{tet_static_integrals, triangle_static_integrals};
use super::swg::SwgSpace;
use super::system::VieSystem;
use super::VieError;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    /// Gauss points per tet for regular (far) pairs: 1, 4, or 11.
    pub far_points: usize,
    /// Gauss points per tet on the outer (tested) side of near pairs.
    pub near_points: usize,
    /// Pairs closer than `near_factor * (r_P + r_Q)` (bounding radii) use the
    /// analytic-inner path, in addition to all vertex-sharing pairs.
    pub near_factor: f64,
    /// Triangle Gauss points for far face charges.
    pub tri_far_points: usize,
    /// Triangle Gauss points on the outer side of near face charges.
    pub tri_near_points: usize,
    /// Guard on `16 N^2` bytes of dense-matrix storage.
    pub matrix_bytes_cap: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            far_points: 4,
            near_points: 11,
            near_factor: 1.5,
            tri_far_points: 3,
            tri_near_points: 7,
            matrix_bytes_cap: 3 << 30,
        }
    }
}

/// Smooth remainder kernel `(e^{-j k0 R} - 1)/(4 pi R)`, finite at R = 0.
#[inline]
fn smooth_kernel(k0: f64, radius: f64) -> Complex {
    let x = k0 * radius;
    if x < 1e-3 {
        // (e^{-jx} - 1)/x * (-j k0 / -j ... ) expanded: -j k0 (1 - jx/2 - x^2/6 + j x^3/24 + x^4/120)
        let series = Complex::new(
            1.0 - x * x / 6.0 + x.powi(4) / 120.0,
            -x / 2.0 + x.powi(3) / 24.0,
        );
        Complex::new(0.0, -k0 / FOUR_PI) * series
    } else {
        (Complex::from_polar(1.0, -x) - Complex::from(1.0)) / Complex::from(FOUR_PI * radius)
    }
}

/// Full kernel `e^{-j k0 R}/(4 pi R)`.
#[inline]
fn full_kernel(k0: f64, radius: f64) -> Complex {
    Complex::from_polar(1.0 / (FOUR_PI * radius), -k0 * radius)
}

struct TetData {
    verts: [Vec3; 4],
    vol: f64,
    centroid: Vec3,
    radius: f64,
    kappa: Complex,
    inv_eps: Complex,
    /// (1/20) sum |v_i - centroid|^2 (for the exact Gram term).
    second_moment: f64,
    far_pts: Vec<(Vec3, f64)>,
    near_pts: Vec<(Vec3, f64)>,
    /// (unknown, basis coefficient s A/(3V), free vertex, test charge s A/V)
    faces: [(usize, f64, Vec3, f64); 4],
}

struct ChargedFace {
    unknown: usize,
    nodes: [usize; 3],
    verts: [Vec3; 3],
    centroid: Vec3,
    radius: f64,
    /// -1 on boundary faces (test side), 0 on interior material jumps.
    test_coeff: f64,
    /// kappa_minus - kappa_plus (interior) or -kappa_plus (boundary).
    source_coeff: Complex,
    far_pts: Vec<(Vec3, f64)>,
    near_pts: Vec<(Vec3, f64)>,
}

struct Workspace {
    tets: Vec<TetData>,
    faces: Vec<ChargedFace>,
    /// charged-face index per unknown, if any
    face_of_unknown: Vec<Option<usize>>,
    k0: f64,
    near_factor: f64,
    mu0_w2: f64,
    inv_eps0: f64,
}

/// Kernel double-integral moments over an ordered (test, source) tet pair.
#[derive(Clone, Copy)]
struct Moments {
    m00: Complex,
    /// moment of the test-side coordinate
    m10: CVec3,
    /// moment of the source-side coordinate
    m01: CVec3,
    m11: Complex,
}

impl Moments {
    fn swap_roles(self) -> Self {
        Self { m00: self.m00, m10: self.m01, m01: self.m10, m11: self.m11 }
    }
}

fn tet_pair_is_near(ws: &Workspace, p: usize, q: usize, shared: bool) -> bool {
    if shared {
        return true;
    }
    let (a, b) = (&ws.tets[p], &ws.tets[q]);
    (a.centroid - b.centroid).norm() < ws.near_factor * (a.radius + b.radius)
}

fn tets_share_vertex(space: &SwgSpace, p: usize, q: usize) -> bool {
    if p == q {
        return true;
    }
    let tp = space.mesh().tets()[p];
    let tq = space.mesh().tets()[q];
    tp.iter().any(|a| tq.contains(a))
}

/// Moments with Gauss outer points on `outer` and analytic static + smooth
/// quadrature inner integrals over `inner`.
fn near_moments(ws: &Workspace, outer: &TetData, inner: &TetData) -> Moments {
    let mut m = Moments {
        m00: Complex::from(0.0),
        m10: CVec3::zeros(),
        m01: CVec3::zeros(),
        m11: Complex::from(0.0),
    };
    for &(x, w) in &outer.near_pts {
        let (stat0, stat1) = tet_static_integrals(x, &inner.verts);
        let mut i0 = Complex::from(stat0 / FOUR_PI);
        // int r' g_static = int (r'-x) g_static + x int g_static
        let mut i1 = (stat1 / FOUR_PI + x * (stat0 / FOUR_PI)).map(Complex::from);
        for &(y, wy) in &inner.far_pts {
            let gs = smooth_kernel(ws.k0, (x - y).norm()) * wy;
            i0 += gs;
            i1 += y.map(|c| Complex::from(c)) * gs;
        }
        m.m00 += i0 * w;
        m.m10 += x.map(Complex::from) * (i0 * w);
        m.m01 += i1.map(|z| z * w);
        m.m11 += (Complex::from(x.x) * i1.x + Complex::from(x.y) * i1.y
            + Complex::from(x.z) * i1.z)
            * w;
    }
    m
}

/// Moments by double Gauss quadrature (regular pairs).
fn far_moments(ws: &Workspace, outer: &TetData, inner: &TetData) -> Moments {
    let mut m = Moments {
        m00: Complex::from(0.0),
        m10: CVec3::zeros(),
        m01: CVec3::zeros(),
        m11: Complex::from(0.0),
    };
    for &(x, wx) in &outer.far_pts {
        let mut i0 = Complex::from(0.0);
        let mut i1 = CVec3::zeros();
        for &(y, wy) in &inner.far_pts {
            let g = full_kernel(ws.k0, (x - y).norm()) * wy;
            i0 += g;
            i1 += y.map(Complex::from) * g;
        }
        m.m00 += i0 * wx;
        m.m10 += x.map(Complex::from) * (i0 * wx);
        m.m01 += i1.map(|z| z * wx);
        m.m11 += (Complex::from(x.x) * i1.x + Complex::from(x.y) * i1.y
            + Complex::from(x.z) * i1.z)
            * wx;
    }
    m
}

/// Moments for the unordered pair `(p, q)`, returned in (test = p, source = q)
/// roles. Near pairs are evaluated in one canonical orientation (analytic
/// inner integral on the larger tet index) so that transposed entries use
/// identical values.
fn pair_moments(ws: &Workspace, space: &SwgSpace, p: usize, q: usize) -> Moments {
    let shared = tets_share_vertex(space, p, q);
    if tet_pair_is_near(ws, p, q, shared) {
        if p <= q {
            near_moments(ws, &ws.tets[p], &ws.tets[q])
        } else {
            near_moments(ws, &ws.tets[q], &ws.tets[p]).swap_roles()
        }
    } else {
        far_moments(ws, &ws.tets[p], &ws.tets[q])
    }
}

/// `int_tet int_face g`, canonical orientation: Gauss outer points on the
/// tet, analytic (near) or Gauss (far) inner integral over the triangle.
fn tet_face_w(ws: &Workspace, space: &SwgSpace, tet: usize, cf: &ChargedFace) -> Complex {
    let t = &ws.tets[tet];
    let shared = {
        let tn = space.mesh().tets()[tet];
        cf.nodes.iter().any(|a| tn.contains(a))
    };
    let near =
        shared || (t.centroid - cf.centroid).norm() < ws.near_factor * (t.radius + cf.radius);
    let mut w_total = Complex::from(0.0);
    if near {
        for &(x, w) in &t.near_pts {
            let (inv, _) = triangle_static_integrals(x, cf.verts[0], cf.verts[1], cf.verts[2]);
            let mut i0 = Complex::from(inv / FOUR_PI);
            for &(y, wy) in &cf.far_pts {
                i0 += smooth_kernel(ws.k0, (x - y).norm()) * wy;
            }
            w_total += i0 * w;
        }
    } else {
        for &(x, w) in &t.far_pts {
            for &(y, wy) in &cf.far_pts {
                w_total += full_kernel(ws.k0, (x - y).norm()) * (w * wy);
            }
        }
    }
    w_total
}

/// `int_face int_face g`, canonical orientation (outer Gauss on the smaller
/// face index).
fn face_face_w(ws: &Workspace, a: usize, b: usize) -> Complex {
    let (oi, ii) = if a <= b { (a, b) } else { (b, a) };
    let (outer, inner) = (&ws.faces[oi], &ws.faces[ii]);
    let shared = outer.nodes.iter().any(|n| inner.nodes.contains(n));
    let near = shared
        || (outer.centroid - inner.centroid).norm()
            < ws.near_factor * (outer.radius + inner.radius);
    let mut w_total = Complex::from(0.0);
    if near {
        for &(x, w) in &outer.near_pts {
            let (inv, _) =
                triangle_static_integrals(x, inner.verts[0], inner.verts[1], inner.verts[2]);
            let mut i0 = Complex::from(inv / FOUR_PI);
            for &(y, wy) in &inner.far_pts {
                i0 += smooth_kernel(ws.k0, (x - y).norm()) * wy;
            }
            w_total += i0 * w;
        }
    } else {
        for &(x, w) in &outer.far_pts {
            for &(y, wy) in &inner.far_pts {
                w_total += full_kernel(ws.k0, (x - y).norm()) * (w * wy);
            }
        }
    }
    w_total
}

fn build_workspace(space: &SwgSpace, opts: &AssemblyOptions) -> Workspace {
    let mesh = space.mesh();
    let far_rule = tet_rule(opts.far_points);
    let near_rule = tet_rule(opts.near_points);
    let tets: Vec<TetData> = (0..mesh.tet_count())
        .map(|t| {
            let verts = mesh.tet_vertices(t);
            let vol = mesh.tet_volume(t);
            let centroid = mesh.tet_centroid(t);
            let radius =
                verts.iter().map(|v| (v - centroid).norm()).fold(0.0f64, f64::max);
            let second_moment =
                verts.iter().map(|v| (v - centroid).norm_squared()).sum::<f64>() / 20.0;
            let pts = |rule: &crate::quad::TetRule| -> Vec<(Vec3, f64)> {
                rule.points
                    .iter()
                    .zip(rule.weights)
                    .map(|(bc, w)| {
                        let p = verts[0] * bc[0]
                            + verts[1] * bc[1]
                            + verts[2] * bc[2]
                            + verts[3] * bc[3];
                        (p, w * vol)
                    })
                    .collect()
            };
            let faces = space.tet_faces(t).map(|f| {
                let free = mesh.nodes()[f.free_vertex];
                (f.unknown, f.sign * f.area / (3.0 * vol), free, f.sign * f.area / vol)
            });
            TetData {
                verts,
                vol,
                centroid,
                radius,
                kappa: space.kappa(t),
                inv_eps: Complex::from(1.0) / space.eps(t),
                second_moment,
                far_pts: pts(&far_rule),
                near_pts: pts(&near_rule),
                faces,
            }
        })
        .collect();

    let tri_far = tri_rule(opts.tri_far_points);
    let tri_near = tri_rule(opts.tri_near_points);
    let mut faces = Vec::new();
    let mut face_of_unknown = vec![None; space.unknown_count()];
    for (u, unk) in space.unknowns().iter().enumerate() {
        let kp = space.kappa(unk.plus_tet);
        let (test_coeff, source_coeff) = match unk.minus_tet {
            Some(minus) => (0.0, space.kappa(minus) - kp),
            None => (-1.0, -kp),
        };
        if test_coeff == 0.0 && source_coeff.norm() == 0.0 {
            continue;
        }
        let verts = [
            mesh.nodes()[unk.face[0]],
            mesh.nodes()[unk.face[1]],
            mesh.nodes()[unk.face[2]],
        ];
        let centroid = (verts[0] + verts[1] + verts[2]) / 3.0;
        let radius = verts.iter().map(|v| (v - centroid).norm()).fold(0.0f64, f64::max);
        let pts = |rule: &crate::quad::TriRule| -> Vec<(Vec3, f64)> {
            rule.points
                .iter()
                .zip(rule.weights)
                .map(|(bc, w)| {
                    (verts[0] * bc[0] + verts[1] * bc[1] + verts[2] * bc[2], w * unk.area)
                })
                .collect()
        };
        face_of_unknown[u] = Some(faces.len());
        faces.push(ChargedFace {
            unknown: u,
            nodes: unk.face,
            verts,
            centroid,
            radius,
            test_coeff,
            source_coeff,
            far_pts: pts(&tri_far),
            near_pts: pts(&tri_near),
        });
    }

    let omega = space.omega();
    Workspace {
        tets,
        faces,
        face_of_unknown,
        k0: space.wavenumber(),
        near_factor: opts.near_factor,
        mu0_w2: SI.mu0 * omega * omega,
        inv_eps0: 1.0 / SI.eps0,
    }
}

/// Assemble the dense Galerkin system at the space's frequency.
pub fn assemble(space: &SwgSpace, opts: &AssemblyOptions) -> Result<VieSystem, VieError> {
    let n = space.unknown_count();
    let bytes = 16usize.saturating_mul(n).saturating_mul(n);
    if bytes > opts.matrix_bytes_cap {
        return Err(VieError::MatrixTooLarge { bytes, cap: opts.matrix_bytes_cap });
    }
    let ws = build_workspace(space, opts);
    let mut matrix = vec![Complex::from(0.0); n * n];

    matrix
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(col_idx, col)| assemble_column(space, &ws, col_idx, col));

    Ok(VieSystem::new(space.clone(), matrix))
}

/// Fill column `n_idx` of the matrix. The column is wholly owned by this
/// call; all iteration orders are fixed, so results are independent of the
/// parallel schedule.
fn assemble_column(space: &SwgSpace, ws: &Workspace, n_idx: usize, col: &mut [Complex]) {
    let unk = &space.unknowns()[n_idx];
    let mesh_nodes = space.mesh().nodes();
    let supports: Vec<(usize, f64, Vec3)> = {
        let mut v = vec![(unk.plus_tet, 1.0, mesh_nodes[unk.free_plus])];
        if let (Some(t), Some(fv)) = (unk.minus_tet, unk.free_minus) {
            v.push((t, -1.0, mesh_nodes[fv]));
        }
        v
    };

    // identity term: exact Gram over shared support tets
    for &(t, s_n, v_n) in &supports {
        let td = &ws.tets[t];
        let c_n = s_n * unk.area / (3.0 * td.vol);
        for &(m, c_m, v_m, _) in &td.faces {
            let geo = td.vol
                * ((td.centroid - v_m).dot(&(td.centroid - v_n)) + td.second_moment);
            col[m] += td.inv_eps * Complex::from(c_m * c_n * geo);
        }
    }

    // vector-potential and volume-charge terms, one source tet at a time
    for &(q, s_n, v_n) in &supports {
        let qd = &ws.tets[q];
        if qd.kappa.norm() == 0.0 {
            continue;
        }
        let c_n = s_n * unk.area / (3.0 * qd.vol);
        let chg_n = qd.kappa * Complex::from(s_n * unk.area / qd.vol);
        let vec_fac = qd.kappa * Complex::from(-ws.mu0_w2 * c_n);
        for p in 0..ws.tets.len() {
            let m = pair_moments(ws, space, p, q);
            let pd = &ws.tets[p];
            let vnc = v_n;
            for &(row, c_m, v_m, chg_m) in &pd.faces {
                // int int f_m . f_n g from coordinate moments
                let dot_m10_vn = m.m10.x * Complex::from(vnc.x)
                    + m.m10.y * Complex::from(vnc.y)
                    + m.m10.z * Complex::from(vnc.z);
                let dot_vm_m01 = m.m01.x * Complex::from(v_m.x)
                    + m.m01.y * Complex::from(v_m.y)
                    + m.m01.z * Complex::from(v_m.z);
                let ffg = m.m11 - dot_m10_vn - dot_vm_m01 + m.m00 * Complex::from(v_m.dot(&vnc));
                col[row] += vec_fac * Complex::from(c_m) * ffg
                    + chg_n * m.m00 * Complex::from(ws.inv_eps0 * chg_m);
            }
        }
        // test face charges against this volume charge
        for cf in &ws.faces {
            if cf.test_coeff == 0.0 {
                continue;
            }
            let w = tet_face_w(ws, space, q, cf);
            col[cf.unknown] += chg_n * w * Complex::from(ws.inv_eps0 * cf.test_coeff);
        }
    }

    // source face charge of this unknown, if it carries one
    if let Some(ci) = ws.face_of_unknown[n_idx] {
        let cf = &ws.faces[ci];
        if cf.source_coeff.norm() > 0.0 {
            for (p, pd) in ws.tets.iter().enumerate() {
                let w = tet_face_w(ws, space, p, cf);
                for &(row, _, _, chg_m) in &pd.faces {
                    col[row] += cf.source_coeff * w * Complex::from(ws.inv_eps0 * chg_m);
                }
            }
            for (fi, other) in ws.faces.iter().enumerate() {
                if other.test_coeff == 0.0 {
                    continue;
                }
                let w = face_face_w(ws, fi, ci);
                col[other.unknown] +=
                    cf.source_coeff * w * Complex::from(ws.inv_eps0 * other.test_coeff);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_box, Material, TetMesh};
    use crate::vie::build_swg_space;
    use std::collections::BTreeMap;

    const OMEGA: f64 = 2.0 * std::f64::consts::PI * 2.87e9;

    fn small_box(material: Material) -> TetMesh {
        generate_box((60e-9, 60e-9, 30e-9), 30e-9, material).unwrap()
    }

    fn matrix_of(mesh: &TetMesh, opts: &AssemblyOptions) -> (usize, Vec<Complex>) {
        let space = build_swg_space(mesh, OMEGA).unwrap();
        let sys = assemble(&space, opts).unwrap();
        (space.unknown_count(), sys.matrix().to_vec())
    }

    #[test]
    fn vacuum_contrast_reduces_to_gram_over_eps0 () {
        let mesh = small_box(Material::vacuum());
        let space = build_swg_space(&mesh, OMEGA).unwrap();
        let sys = assemble(&space, &AssemblyOptions::default()).unwrap();
        let n = space.unknown_count();
        // reference Gram by quadrature
        let rule = tet_rule(11);
        let mut gram = vec![Complex::from(0.0); n * n];
        for t in 0..mesh.tet_count() {
            let verts = mesh.tet_vertices(t);
            let vol = mesh.tet_volume(t);
            let faces = space.tet_faces(t);
            for (bc, w) in rule.points.iter().zip(rule.weights) {
                let p = verts[0] * bc[0] + verts[1] * bc[1] + verts[2] * bc[2] + verts[3] * bc[3];
                for fa in faces.iter() {
                    for fb in faces.iter() {
                        let va = space.basis_in_tet(fa.unknown, t, p);
                        let vb = space.basis_in_tet(fb.unknown, t, p);
                        gram[fb.unknown * n + fa.unknown] +=
                            Complex::from(w * vol * va.dot(&vb) / crate::constants::SI.eps0);
                    }
                }
            }
        }
        let scale = gram.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in sys.matrix().iter().zip(&gram) {
            assert!((a - b).norm() <= 1e-12 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn matrix_is_complex_symmetric_for_uniform_material() {
        let mesh = small_box(Material::silver_room());
        let (n, m) = matrix_of(&mesh, &AssemblyOptions::default());
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((m[j * n + i] - m[i * n + j]).norm());
            }
        }
        assert!(worst <= 1e-8 * scale, "asymmetry {:.3e} of {:.3e}", worst, scale);
    }

    #[test]
    fn quadrature_refinement_stable_for_separated_pair() {
        // two well-separated single-tet bodies: doubling quadrature order
        // changes entries by < 1e-6 relative
        let mut nodes = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(30e-9, 0.0, 0.0),
            Vec3::new(0.0, 30e-9, 0.0),
            Vec3::new(0.0, 0.0, 30e-9),
        ];
        // ~400 element sizes apart, where the low-order rule error on the
        // coupling block sits well below the 1e-6 gate
        let shift = Vec3::new(12800e-9, 0.0, 0.0);
        nodes.extend(nodes.clone().iter().map(|p| p + shift));
        let mut materials = BTreeMap::new();
        materials.insert(0, Material::silver_room());
        let mesh = TetMesh::new(
            nodes,
            vec![[0, 1, 2, 3], [4, 5, 6, 7]],
            vec![0, 0],
            materials,
        )
        .unwrap();
        let coarse = AssemblyOptions { far_points: 4, ..Default::default() };
        let fine = AssemblyOptions { far_points: 11, ..Default::default() };
        let (n, a) = matrix_of(&mesh, &coarse);
        let (_, b) = matrix_of(&mesh, &fine);
        // compare the cross-body block only (indices of unknowns on tet 0 vs tet 1)
        let space = build_swg_space(&mesh, OMEGA).unwrap();
        let on_first: Vec<usize> = (0..n)
            .filter(|&u| space.unknowns()[u].plus_tet == 0)
            .collect();
        let on_second: Vec<usize> =
            (0..n).filter(|&u| space.unknowns()[u].plus_tet == 1).collect();
        let bref = &b;
        let scale = on_first
            .iter()
            .flat_map(|&i| on_second.iter().map(move |&j| bref[j * n + i].norm()))
            .fold(0.0f64, f64::max);
        for &i in &on_first {
            for &j in &on_second {
                let (x, y) = (a[j * n + i], b[j * n + i]);
                assert!(
                    (x - y).norm() <= 1e-6 * scale,
                    "entry ({i},{j}): {x} vs {y} (scale {scale:.3e})"
                );
            }
        }
    }

    #[test]
    fn rejects_oversized_matrix() {
        let mesh = small_box(Material::silver_room());
        let space = build_swg_space(&mesh, OMEGA).unwrap();
        let opts = AssemblyOptions { matrix_bytes_cap: 100, ..Default::default() };
        assert!(matches!(
            assemble(&space, &opts),
            Err(VieError::MatrixTooLarge { .. })
        ));
    }
}
