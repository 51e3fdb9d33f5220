//! Analytic static-kernel integrals over triangles and tetrahedra.
//!
//! Closed forms for `int 1/R dS`, `int R dS` over a triangle and
//! `int 1/R dV`, `int (r'-x)/R dV` over a tetrahedron, built from per-edge
//! primitives (Wilton/Graglia style). These carry the 1/(4 pi R) static
//! singularity of the Green's function; the smooth remainder
//! `(e^{-j k0 R} - 1)/(4 pi R)` is handled by regular quadrature in the
//! assembler.

use crate::Vec3;

/// Per-triangle integrals of R^{-1} and R at observation point `x`.
///
/// Returns `(int 1/R dS, int R dS)` over the triangle `(a, b, c)`.
pub fn triangle_static_integrals(x: Vec3, a: Vec3, b: Vec3, c: Vec3) -> (f64, f64) {
    let mut normal = (b - a).cross(&(c - a));
    let area2 = normal.norm();
    if area2 == 0.0 {
        return (0.0, 0.0);
    }
    normal /= area2;
    // signed height of x over the plane
    let d = (x - a).dot(&normal);
    let rho = x - normal * d;
    let dabs = d.abs();

    let mut i_inv = 0.0; // int 1/R
    let mut i_lin = 0.0; // sum over edges for int R
    let mut beta_sum = 0.0;
    for (p_minus, p_plus) in [(a, b), (b, c), (c, a)] {
        let edge = p_plus - p_minus;
        let len = edge.norm();
        if len == 0.0 {
            continue;
        }
        let lhat = edge / len;
        let mhat = lhat.cross(&normal); // outward in-plane edge normal (CCW)
        let t0 = (p_minus - rho).dot(&mhat);
        let s_minus = (p_minus - rho).dot(&lhat);
        let s_plus = (p_plus - rho).dot(&lhat);
        let r0_sq = t0 * t0 + d * d;
        let r_minus = (s_minus * s_minus + r0_sq).sqrt();
        let r_plus = (s_plus * s_plus + r0_sq).sqrt();

        // stable log term ln((R+ + s+)/(R- + s-))
        let f2 = if r0_sq == 0.0 {
            // observation on the edge line; the edge's own contribution to
            // the potential vanishes with t0 -> 0, keep it finite
            0.0
        } else if s_minus >= 0.0 {
            ((r_plus + s_plus) / (r_minus + s_minus)).ln()
        } else if s_plus <= 0.0 {
            ((r_minus - s_minus) / (r_plus - s_plus)).ln()
        } else {
            ((r_plus + s_plus) * (r_minus - s_minus) / r0_sq).ln()
        };

        let beta = if dabs == 0.0 {
            0.0
        } else {
            (t0 * s_plus).atan2(r0_sq + dabs * r_plus)
                - (t0 * s_minus).atan2(r0_sq + dabs * r_minus)
        };
        beta_sum += beta;

        i_inv += t0 * f2;
        // int_edge R dl = (s+ R+ - s- R-)/2 + (R0^2 / 2) f2
        i_lin += t0 * (0.5 * (s_plus * r_plus - s_minus * r_minus) + 0.5 * r0_sq * f2);
    }
    i_inv -= dabs * beta_sum;
    // (q+2) I_q = sum_i t0 int_edge R^q + q d^2 I_{q-2}, with q = 1
    let i_r = (i_lin + d * d * i_inv) / 3.0;
    (i_inv, i_r)
}

/// Static tetrahedron potentials at `x`:
/// `(int 1/R dV, int (r' - x)/R dV)` over the tet `verts`.
///
/// Volume integrals are reduced to the four face integrals via
/// `2/R = div' (r'-x)/R` and `grad' R = (r'-x)/R`.
pub fn tet_static_integrals(x: Vec3, verts: &[Vec3; 4]) -> (f64, Vec3) {
    const FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    let centroid = (verts[0] + verts[1] + verts[2] + verts[3]) * 0.25;
    let mut i0 = 0.0;
    let mut i1 = Vec3::zeros();
    for (opp, face) in FACES.iter().enumerate() {
        let (mut a, mut b, c) = (verts[face[0]], verts[face[1]], verts[face[2]]);
        // outward normal: away from the opposite vertex
        let mut n = (b - a).cross(&(c - a));
        if (a - verts[opp]).dot(&n) < 0.0 {
            std::mem::swap(&mut a, &mut b);
            n = -n;
        }
        let nhat = n / n.norm();
        debug_assert!((a - centroid).dot(&nhat) > 0.0);
        let (inv, lin) = triangle_static_integrals(x, a, b, c);
        let dist = (a - x).dot(&nhat);
        i0 += 0.5 * dist * inv;
        i1 += nhat * lin;
    }
    (i0, i1)
}
