//! Shared test support: sphere meshing, the analytic eddy-current sphere
//! model, and a brute-force 2-D momentum quadrature of the layered reflected
//! Green tensor. These oracles are kept independent of the library's
//! fast paths they validate.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qem::constants::SI;
use qem::layered::{fresnel_slab, LayeredStack};
use qem::mesh::{Material, TetMesh};
use qem::quad::{adaptive_gk, AdaptiveOptions};
use qem::{CMat3, CVec3, Complex, Mat3, Vec3};

/// Map a cube point in [-1, 1]^3 onto the unit ball (spherified cube).
fn spherify(p: Vec3) -> Vec3 {
    let (x2, y2, z2) = (p.x * p.x, p.y * p.y, p.z * p.z);
    Vec3::new(
        p.x * (1.0 - y2 / 2.0 - z2 / 2.0 + y2 * z2 / 3.0).max(0.0).sqrt(),
        p.y * (1.0 - x2 / 2.0 - z2 / 2.0 + x2 * z2 / 3.0).max(0.0).sqrt(),
        p.z * (1.0 - x2 / 2.0 - y2 / 2.0 + x2 * y2 / 3.0).max(0.0).sqrt(),
    )
}

/// Conformal tet mesh of a sphere: an n^3 cube grid mapped through the
/// spherified-cube transform, each hex split into 6 Kuhn tets. Surface
/// vertices land exactly on the sphere of the given radius.
pub fn sphere_mesh(radius: f64, n: usize, material: Material) -> TetMesh {
    let n = n as i64;
    let mut nodes = Vec::new();
    let mut ids = std::collections::HashMap::new();
    let mut node = |i: i64, j: i64, k: i64, nodes: &mut Vec<Vec3>| -> usize {
        *ids.entry((i, j, k)).or_insert_with(|| {
            let p = Vec3::new(
                2.0 * i as f64 / n as f64 - 1.0,
                2.0 * j as f64 / n as f64 - 1.0,
                2.0 * k as f64 / n as f64 - 1.0,
            );
            nodes.push(spherify(p) * radius);
            nodes.len() - 1
        })
    };
    // Kuhn 6-split, uniform orientation (conformal across cells)
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let mut tets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for (perm, even) in PERMS {
                    let mut w = [i, j, k];
                    let v0 = node(w[0], w[1], w[2], &mut nodes);
                    w[perm[0]] += 1;
                    let v1 = node(w[0], w[1], w[2], &mut nodes);
                    w[perm[1]] += 1;
                    let v2 = node(w[0], w[1], w[2], &mut nodes);
                    let v3 = node(i + 1, j + 1, k + 1, &mut nodes);
                    let t = if even { [v0, v1, v2, v3] } else { [v0, v2, v1, v3] };
                    tets.push(t);
                }
            }
        }
    }
    let regions = vec![0u32; tets.len()];
    let mut materials = BTreeMap::new();
    materials.insert(0, material);
    TetMesh::new(nodes, tets, regions, materials).expect("sphere mesh valid")
}

/// Complex cotangent via exp; stable for the small |x| used here through the
/// series fallback in `eddy_polarizability`.
fn cot(z: Complex) -> Complex {
    let e = (Complex::new(0.0, 2.0) * z).exp();
    Complex::new(0.0, 1.0) * (e + Complex::from(1.0)) / (e - Complex::from(1.0))
}

/// Magnetic polarizability of a conducting sphere in a uniform AC field,
/// physics convention: `m = alpha H0`, with
/// `alpha = -2 pi a^3 [1 - 3/x^2 + (3/x) cot(x)]`, `x = (1+i) a / delta`.
pub fn eddy_polarizability(radius: f64, conductivity: f64, omega: f64) -> Complex {
    let delta = (2.0 / (SI.mu0 * conductivity * omega)).sqrt();
    let x = Complex::new(1.0, 1.0) * Complex::from(radius / delta);
    let d = if x.norm() < 0.2 {
        // 1 - 3/x^2 + 3 cot(x)/x = -x^2/15 - 2 x^4/315 - x^6/1575 - ...
        let x2 = x * x;
        -x2 / Complex::from(15.0)
            - x2 * x2 / Complex::from(157.5)
            - x2 * x2 * x2 / Complex::from(1575.0)
    } else {
        Complex::from(1.0) - Complex::from(3.0) / (x * x) + Complex::from(3.0) * cot(x) / x
    };
    Complex::from(-2.0 * std::f64::consts::PI * radius.powi(3)) * d
}

/// Physics-convention free-space magnetic dyadic (conjugate of the
/// engineering form provided by the library).
fn g0_physics(r: Vec3, rp: Vec3, k0: f64) -> CMat3 {
    qem::freespace::free_space_gm(r, rp, k0)
        .expect("distinct points")
        .map(|z| z.conj())
}

/// Point-response model of the reflected Green tensor of a small conducting
/// sphere centered at `center`:
/// `G^r = k0^2 G0(r_i, c) alpha G0(c, r_j)`.
pub fn sphere_point_response(
    r_i: Vec3,
    r_j: Vec3,
    center: Vec3,
    radius: f64,
    conductivity: f64,
    omega: f64,
) -> CMat3 {
    let k0 = SI.wavenumber(omega);
    let alpha = eddy_polarizability(radius, conductivity, omega);
    let gi = g0_physics(r_i, center, k0);
    let gj = g0_physics(center, r_j, k0);
    (gi * gj).map(|z| z * alpha * Complex::from(k0 * k0))
}

/// Brute-force 2-D in-plane-momentum integral of the layered reflected
/// magnetic Green tensor: numeric angular integration of the polarization
/// matrices (no Bessel reduction), radial integration over the same
/// propagating/evanescent split. Engineering convention internally,
/// physics-convention output.
pub fn layered_brute_force_2d(
    r_i: Vec3,
    r_j: Vec3,
    omega: f64,
    stack: &LayeredStack,
    rel_tol: f64,
) -> CMat3 {
    let k0 = SI.wavenumber(omega);
    let zsum = r_i.z + r_j.z;
    let dx = r_i.x - r_j.x;
    let dy = r_i.y - r_j.y;
    let opts = AdaptiveOptions { rel_tol, abs_tol: 0.0, max_intervals: 3000 };

    let angular = |q: f64, kz: Complex| -> CMat3 {
        let f = fresnel_slab(q, omega, stack);
        let (m, _) = adaptive_gk(
            |phi: f64| {
                let (s, c) = phi.sin_cos();
                let (qx, qy) = (q * c, q * s);
                let q2 = q * q;
                // engineering phase: conjugate of the printed e^{i q . d}
                let phase = Complex::from_polar(1.0, -(qx * dx + qy * dy));
                let mut mm = CMat3::zeros();
                let rp = f.r_pp / Complex::from(q2);
                mm[(0, 0)] += rp * Complex::from(qy * qy);
                mm[(0, 1)] -= rp * Complex::from(qx * qy);
                mm[(1, 0)] -= rp * Complex::from(qx * qy);
                mm[(1, 1)] += rp * Complex::from(qx * qx);
                let rs = f.r_ss / Complex::from(k0 * k0 * q2);
                let kz2 = kz * kz;
                mm[(0, 0)] -= rs * kz2 * Complex::from(qx * qx);
                mm[(0, 1)] -= rs * kz2 * Complex::from(qx * qy);
                mm[(1, 0)] -= rs * kz2 * Complex::from(qx * qy);
                mm[(1, 1)] -= rs * kz2 * Complex::from(qy * qy);
                mm[(0, 2)] -= rs * kz * Complex::from(qx * q2);
                mm[(1, 2)] -= rs * kz * Complex::from(qy * q2);
                mm[(2, 0)] += rs * kz * Complex::from(q2 * qx);
                mm[(2, 1)] += rs * kz * Complex::from(q2 * qy);
                mm[(2, 2)] += rs * Complex::from(q2 * q2);
                mm.map(|v| v * phase)
            },
            0.0,
            2.0 * std::f64::consts::PI,
            &opts,
        )
        .expect("angular quadrature");
        m
    };

    let pref = Complex::new(0.0, -1.0 / (8.0 * std::f64::consts::PI.powi(2)));
    let (prop, _) = adaptive_gk(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            let q = k0 * s;
            let kz = Complex::from(k0 * c);
            let phase = (Complex::new(0.0, -zsum) * kz).exp();
            angular(q, kz).map(|v| v * pref * Complex::from(k0 * s) * phase)
        },
        0.0,
        std::f64::consts::PI / 2.0,
        &opts,
    )
    .expect("propagating segment");
    let q_max = (60.0 / zsum).max(50.0 * k0);
    let kappa_max = (q_max * q_max - k0 * k0).sqrt();
    let (evan, _) = adaptive_gk(
        |kappa: f64| {
            let q = k0.hypot(kappa);
            let kz = Complex::new(0.0, -kappa);
            let damp = (-kappa * zsum).exp();
            angular(q, kz).map(|v| v * Complex::from(damp / (8.0 * std::f64::consts::PI.powi(2))))
        },
        0.0,
        kappa_max,
        &opts,
    )
    .expect("evanescent segment");
    (prop + evan).map(|z| z.conj())
}

/// Componentwise relative agreement on entries that carry at least
/// `floor_frac` of the largest entry magnitude; returns the worst ratio.
pub fn worst_component_error(got: &CMat3, want: &CMat3, floor_frac: f64) -> f64 {
    let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for r in 0..3 {
        for c in 0..3 {
            let w = want[(r, c)];
            if w.norm() >= floor_frac * scale {
                worst = worst.max((got[(r, c)] - w).norm() / w.norm());
            }
        }
    }
    worst
}

/// Log-log least-squares slope of (x, y) samples.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0.ln()).sum();
    let sy: f64 = points.iter().map(|p| p.1.ln()).sum();
    let sxx: f64 = points.iter().map(|p| p.0.ln().powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.0.ln() * p.1.ln()).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Convenience: silver/aluminum scenario constants used across tests.
pub const OMEGA_NV: f64 = 2.0 * std::f64::consts::PI * 2.87e9;
pub const OMEGA_QC: f64 = 2.0 * std::f64::consts::PI * 18.0e9;

pub fn im_psd_defect(t: &CMat3) -> f64 {
    let im = t.map(|z| Complex::from(z.im));
    let eigs = qem::linalg::hermitian_eigenvalues_3x3(&im);
    let max = eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    if max == 0.0 {
        0.0
    } else {
        (-eigs[0] / max).max(0.0)
    }
}

pub fn silver() -> Material {
    Material::silver_room()
}

pub fn aluminum() -> Material {
    Material::aluminum_cryo()
}

/// Dominant-entry magnitude of a complex tensor.
pub fn tensor_scale(t: &CMat3) -> f64 {
    t.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn cvec(x: f64, y: f64, z: f64) -> CVec3 {
    CVec3::new(Complex::from(x), Complex::from(y), Complex::from(z))
}

pub fn im_part(t: &CMat3) -> Mat3 {
    t.map(|z| z.im)
}
