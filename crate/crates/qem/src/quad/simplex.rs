//! Fixed symmetric Gauss rules on tetrahedra and triangles, plus midpoint
//! subdivision for near-singular integrands.
//!
//! Rule weights are normalized to sum to 1; multiply by the simplex measure.

use crate::Vec3;

/// Quadrature rule on the reference tetrahedron, stored as barycentric
/// coordinates (4 per point) and unit-sum weights.
#[derive(Debug, Clone, Copy)]
pub struct TetRule {
    pub points: &'static [[f64; 4]],
    pub weights: &'static [f64],
    /// Polynomial degree integrated exactly.
    pub degree: usize,
}

/// Centroid rule, degree 1.
pub const TET_RULE_1: TetRule = TetRule {
    points: &[[0.25, 0.25, 0.25, 0.25]],
    weights: &[1.0],
    degree: 1,
};

const TET4_A: f64 = 0.585_410_196_624_968_5;
const TET4_B: f64 = 0.138_196_601_125_010_5;

/// 4-point rule, degree 2.
pub const TET_RULE_4: TetRule = TetRule {
    points: &[
        [TET4_A, TET4_B, TET4_B, TET4_B],
        [TET4_B, TET4_A, TET4_B, TET4_B],
        [TET4_B, TET4_B, TET4_A, TET4_B],
        [TET4_B, TET4_B, TET4_B, TET4_A],
    ],
    weights: &[0.25, 0.25, 0.25, 0.25],
    degree: 2,
};

// Keast 11-point rule, degree 4 (one negative weight).
const K11_B: f64 = 0.071_428_571_428_571_43; // 1/14
const K11_A: f64 = 1.0 - 3.0 * K11_B;
const K11_C: f64 = 0.399_403_576_166_799_2;
const K11_D: f64 = 0.100_596_423_833_200_8;
const K11_W0: f64 = -0.078_933_333_333_333_33;
const K11_W1: f64 = 0.045_733_333_333_333_33;
const K11_W2: f64 = 0.149_333_333_333_333_33;

/// Keast 11-point rule, degree 4.
pub const TET_RULE_11: TetRule = TetRule {
    points: &[
        [0.25, 0.25, 0.25, 0.25],
        [K11_A, K11_B, K11_B, K11_B],
        [K11_B, K11_A, K11_B, K11_B],
        [K11_B, K11_B, K11_A, K11_B],
        [K11_B, K11_B, K11_B, K11_A],
        [K11_C, K11_C, K11_D, K11_D],
        [K11_C, K11_D, K11_C, K11_D],
        [K11_C, K11_D, K11_D, K11_C],
        [K11_D, K11_C, K11_C, K11_D],
        [K11_D, K11_C, K11_D, K11_C],
        [K11_D, K11_D, K11_C, K11_C],
    ],
    weights: &[K11_W0, K11_W1, K11_W1, K11_W1, K11_W1, K11_W2, K11_W2, K11_W2, K11_W2, K11_W2, K11_W2],
    degree: 4,
};

/// Select a tet rule by requested point count (1, 4, or 11).
pub fn tet_rule(points: usize) -> TetRule {
    match points {
        0..=1 => TET_RULE_1,
        2..=4 => TET_RULE_4,
        _ => TET_RULE_11,
    }
}

/// Quadrature rule on the reference triangle (barycentric points, unit-sum
/// weights).
#[derive(Debug, Clone, Copy)]
pub struct TriRule {
    pub points: &'static [[f64; 3]],
    pub weights: &'static [f64],
    pub degree: usize,
}

/// Centroid rule, degree 1.
pub const TRI_RULE_1: TriRule = TriRule {
    points: &[[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]],
    weights: &[1.0],
    degree: 1,
};

/// 3-point interior rule, degree 2.
pub const TRI_RULE_3: TriRule = TriRule {
    points: &[
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ],
    weights: &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    degree: 2,
};

const TRI6_A: f64 = 0.445_948_490_915_965;
const TRI6_B: f64 = 0.091_576_213_509_771;
const TRI6_WA: f64 = 0.223_381_589_678_011;
const TRI6_WB: f64 = 0.109_951_743_655_322;

/// Dunavant 6-point rule, degree 4.
pub const TRI_RULE_6: TriRule = TriRule {
    points: &[
        [1.0 - 2.0 * TRI6_A, TRI6_A, TRI6_A],
        [TRI6_A, 1.0 - 2.0 * TRI6_A, TRI6_A],
        [TRI6_A, TRI6_A, 1.0 - 2.0 * TRI6_A],
        [1.0 - 2.0 * TRI6_B, TRI6_B, TRI6_B],
        [TRI6_B, 1.0 - 2.0 * TRI6_B, TRI6_B],
        [TRI6_B, TRI6_B, 1.0 - 2.0 * TRI6_B],
    ],
    weights: &[TRI6_WA, TRI6_WA, TRI6_WA, TRI6_WB, TRI6_WB, TRI6_WB],
    degree: 4,
};

const TRI7_A: f64 = 0.470_142_064_105_115;
const TRI7_B: f64 = 0.101_286_507_323_456;
const TRI7_WA: f64 = 0.132_394_152_788_506;
const TRI7_WB: f64 = 0.125_939_180_544_827;

/// Dunavant 7-point rule, degree 5.
pub const TRI_RULE_7: TriRule = TriRule {
    points: &[
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [1.0 - 2.0 * TRI7_A, TRI7_A, TRI7_A],
        [TRI7_A, 1.0 - 2.0 * TRI7_A, TRI7_A],
        [TRI7_A, TRI7_A, 1.0 - 2.0 * TRI7_A],
        [1.0 - 2.0 * TRI7_B, TRI7_B, TRI7_B],
        [TRI7_B, 1.0 - 2.0 * TRI7_B, TRI7_B],
        [TRI7_B, TRI7_B, 1.0 - 2.0 * TRI7_B],
    ],
    weights: &[0.225, TRI7_WA, TRI7_WA, TRI7_WA, TRI7_WB, TRI7_WB, TRI7_WB],
    degree: 5,
};

/// Select a triangle rule by requested point count (1, 3, 6, or 7).
pub fn tri_rule(points: usize) -> TriRule {
    match points {
        0..=1 => TRI_RULE_1,
        2..=3 => TRI_RULE_3,
        4..=6 => TRI_RULE_6,
        _ => TRI_RULE_7,
    }
}

/// Split a tetrahedron at edge midpoints into 8 sub-tets (4 corners + a
/// 4-tet octahedron fill). Orientation is not normalized; use |volume|.
pub fn split_tet(v: &[Vec3; 4]) -> [[Vec3; 4]; 8] {
    let m01 = (v[0] + v[1]) * 0.5;
    let m02 = (v[0] + v[2]) * 0.5;
    let m03 = (v[0] + v[3]) * 0.5;
    let m12 = (v[1] + v[2]) * 0.5;
    let m13 = (v[1] + v[3]) * 0.5;
    let m23 = (v[2] + v[3]) * 0.5;
    [
        [v[0], m01, m02, m03],
        [v[1], m01, m12, m13],
        [v[2], m02, m12, m23],
        [v[3], m03, m13, m23],
        // octahedron split along the m01-m23 diagonal
        [m01, m23, m02, m03],
        [m01, m23, m03, m13],
        [m01, m23, m13, m12],
        [m01, m23, m12, m02],
    ]
}

/// Split a triangle at edge midpoints into 4 sub-triangles.
pub fn split_tri(v: &[Vec3; 3]) -> [[Vec3; 3]; 4] {
    let m01 = (v[0] + v[1]) * 0.5;
    let m02 = (v[0] + v[2]) * 0.5;
    let m12 = (v[1] + v[2]) * 0.5;
    [
        [v[0], m01, m02],
        [v[1], m12, m01],
        [v[2], m02, m12],
        [m01, m12, m02],
    ]
}
