//! Structured mesh generators: boxes, patch arrays, and gate layouts.
//!
//! Hexahedral cells are split into 6 tets with the Kuhn decomposition around
//! the cell's main diagonal, using the same orientation in every cell. Quad
//! faces then receive matching diagonals on both sides by translation
//! invariance, so the result is conformal without per-cell parity flips.

use std::collections::{BTreeMap, HashMap};

use crate::Vec3;

use super::tetmesh::signed_volume;
use super::{Material, MeshError, TetMesh};

/// Gate thickness of the thin metal class, meters.
pub const GATE_THIN_M: f64 = 100.0e-9;
/// Gate thickness of the thick metal class, meters.
pub const GATE_THICK_M: f64 = 150.0e-9;

/// Even and odd permutations of the axes; the Kuhn split walks each
/// permutation from the low cell corner to the high corner.
const PERMS: [([usize; 3], bool); 6] = [
    ([0, 1, 2], true),
    ([1, 2, 0], true),
    ([2, 0, 1], true),
    ([0, 2, 1], false),
    ([2, 1, 0], false),
    ([1, 0, 2], false),
];

/// Accumulates cells on a global integer lattice and emits a conformal
/// tet mesh. Node ids are assigned in first-encounter order, which makes the
/// output deterministic.
struct LatticeMesher {
    origin: Vec3,
    spacing: Vec3,
    node_ids: HashMap<(i64, i64, i64), usize>,
    nodes: Vec<Vec3>,
    tets: Vec<[usize; 4]>,
    regions: Vec<u32>,
}

impl LatticeMesher {
    fn new(origin: Vec3, spacing: Vec3) -> Self {
        Self {
            origin,
            spacing,
            node_ids: HashMap::new(),
            nodes: Vec::new(),
            tets: Vec::new(),
            regions: Vec::new(),
        }
    }

    fn node(&mut self, i: i64, j: i64, k: i64) -> usize {
        let origin = self.origin;
        let spacing = self.spacing;
        let next = self.nodes.len();
        match self.node_ids.entry((i, j, k)) {
            std::collections::hash_map::Entry::Occupied(e) => *e.get(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(next);
                self.nodes.push(Vec3::new(
                    origin.x + i as f64 * spacing.x,
                    origin.y + j as f64 * spacing.y,
                    origin.z + k as f64 * spacing.z,
                ));
                next
            }
        }
    }

    /// Add the 6 Kuhn tets of cell (i, j, k) -> (i+1, j+1, k+1).
    fn add_cell(&mut self, c: (i64, i64, i64), region: u32) {
        for (perm, even) in PERMS {
            let mut walk = [c.0, c.1, c.2];
            let v0 = self.node(walk[0], walk[1], walk[2]);
            walk[perm[0]] += 1;
            let v1 = self.node(walk[0], walk[1], walk[2]);
            walk[perm[1]] += 1;
            let v2 = self.node(walk[0], walk[1], walk[2]);
            let v3 = self.node(c.0 + 1, c.1 + 1, c.2 + 1);
            let tet = if even { [v0, v1, v2, v3] } else { [v0, v2, v1, v3] };
            self.tets.push(tet);
            self.regions.push(region);
        }
    }

    fn finish(self, materials: BTreeMap<u32, Material>, cap: usize) -> Result<TetMesh, MeshError> {
        TetMesh::with_cap(self.nodes, self.tets, self.regions, materials, cap)
    }
}

fn cell_count(length: f64, h: f64) -> i64 {
    ((length / h) - 1e-9).ceil().max(1.0) as i64
}

/// Structured tet mesh of an axis-aligned box `[0, Lx] x [0, Ly] x [0, Lz]`
/// with target edge length `h` (6 Kuhn tets per hex cell).
pub fn generate_box(
    dims: (f64, f64, f64),
    h: f64,
    material: Material,
) -> Result<TetMesh, MeshError> {
    generate_box_with_cap(dims, h, material, super::DEFAULT_MAX_TETS)
}

/// [`generate_box`] with an explicit tet budget.
pub fn generate_box_with_cap(
    dims: (f64, f64, f64),
    h: f64,
    material: Material,
    cap: usize,
) -> Result<TetMesh, MeshError> {
    let (lx, ly, lz) = dims;
    if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
        return Err(MeshError::Generator(format!("box dimensions must be positive, got {dims:?}")));
    }
    if !(h > 0.0) {
        return Err(MeshError::Generator(format!("edge length must be positive, got {h}")));
    }
    if h > lx * (1.0 + 1e-12) || h > ly * (1.0 + 1e-12) || h > lz * (1.0 + 1e-12) {
        return Err(MeshError::Generator(format!(
            "edge length {h} exceeds a box dimension {dims:?}"
        )));
    }
    let (nx, ny, nz) = (cell_count(lx, h), cell_count(ly, h), cell_count(lz, h));
    let spacing = Vec3::new(lx / nx as f64, ly / ny as f64, lz / nz as f64);
    let mut mesher = LatticeMesher::new(Vec3::zeros(), spacing);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                mesher.add_cell((i, j, k), 0);
            }
        }
    }
    let mut materials = BTreeMap::new();
    materials.insert(0, material);
    mesher.finish(materials, cap)
}

/// `n x n` array of square patches (side `a`, thickness `t`, gap `b`) with
/// coplanar tops at z = 0, centered on the origin in x-y. Patches are
/// disjoint bodies with center-to-center pitch `a + b`.
pub fn generate_patch_array(
    a: f64,
    b: f64,
    t: f64,
    n: usize,
    h: f64,
    material: Material,
) -> Result<TetMesh, MeshError> {
    if b <= 0.0 {
        return Err(MeshError::Generator(format!(
            "patch gap must be positive (patches would overlap), got {b}"
        )));
    }
    if !(a > 0.0 && t > 0.0 && h > 0.0) {
        return Err(MeshError::Generator(format!(
            "patch parameters must be positive: a={a}, t={t}, h={h}"
        )));
    }
    if n == 0 {
        return Err(MeshError::Generator("patch count must be >= 1".into()));
    }
    let single = generate_box_with_cap((a, a, t), h, material.clone(), usize::MAX)?;
    let pitch = a + b;
    let mut nodes = Vec::new();
    let mut tets = Vec::new();
    let mut regions = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let cx = (i as f64 - (n as f64 - 1.0) / 2.0) * pitch;
            let cy = (j as f64 - (n as f64 - 1.0) / 2.0) * pitch;
            let shift = Vec3::new(cx - a / 2.0, cy - a / 2.0, -t);
            let offset = nodes.len();
            nodes.extend(single.nodes().iter().map(|p| p + shift));
            tets.extend(single.tets().iter().map(|t| t.map(|v| v + offset)));
            regions.extend(single.regions().iter().copied());
        }
    }
    let mut materials = BTreeMap::new();
    materials.insert(0, material);
    TetMesh::new(nodes, tets, regions, materials)
}

/// Metal thickness class of a gate-layout box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThicknessClass {
    /// 100 nm metal.
    Thin,
    /// 150 nm metal.
    Thick,
}

impl ThicknessClass {
    pub fn thickness(self) -> f64 {
        match self {
            ThicknessClass::Thin => GATE_THIN_M,
            ThicknessClass::Thick => GATE_THICK_M,
        }
    }
}

/// Axis-aligned footprint of one gate-layout box; metal spans
/// `z in [-thickness, 0]`.
#[derive(Debug, Clone, Copy)]
pub struct GateBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub class: ThicknessClass,
}

/// Built-in gate layout approximating a three-qubit device's top-gate stack:
/// a 1200 x 650 nm envelope with thick (150 nm) outer pads and a thin
/// (100 nm) central region, tops coplanar at z = 0, centered in x-y.
/// The interior gate-finger pattern of real devices is not reproduced.
pub fn default_gate_layout() -> Vec<GateBox> {
    let nm = 1.0e-9;
    let (y0, y1) = (-325.0 * nm, 325.0 * nm);
    vec![
        GateBox { x0: -600.0 * nm, x1: -300.0 * nm, y0, y1, class: ThicknessClass::Thick },
        GateBox { x0: -300.0 * nm, x1: 300.0 * nm, y0, y1, class: ThicknessClass::Thin },
        GateBox { x0: 300.0 * nm, x1: 600.0 * nm, y0, y1, class: ThicknessClass::Thick },
    ]
}

fn nearly_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() <= 1e-6 {
        Some(r as i64)
    } else {
        None
    }
}

/// Union mesh of axis-aligned gate boxes with conformal shared interfaces.
///
/// All boxes share the common top plane z = 0 and extend downward by their
/// thickness class. Box edges must sit on a common lattice of pitch `h`
/// (anchored at the layout's minimum corner) so abutting faces weld into
/// shared nodes; `h` must also divide both metal thicknesses.
pub fn generate_gate_layout(
    boxes: &[GateBox],
    h: f64,
    material: Material,
) -> Result<TetMesh, MeshError> {
    if boxes.is_empty() {
        return Err(MeshError::Generator("gate layout needs at least one box".into()));
    }
    if !(h > 0.0) {
        return Err(MeshError::Generator(format!("edge length must be positive, got {h}")));
    }
    for (i, b) in boxes.iter().enumerate() {
        if !(b.x1 > b.x0 && b.y1 > b.y0) {
            return Err(MeshError::Generator(format!("gate box {i} has non-positive extent")));
        }
    }
    // Reject partial overlaps; exact abutment (zero-area contact) is fine.
    for i in 0..boxes.len() {
        for j in (i + 1)..boxes.len() {
            let (a, b) = (&boxes[i], &boxes[j]);
            let dx = a.x1.min(b.x1) - a.x0.max(b.x0);
            let dy = a.y1.min(b.y1) - a.y0.max(b.y0);
            if dx > 1e-15 && dy > 1e-15 {
                return Err(MeshError::OverlappingBoxes { a: i, b: j });
            }
        }
    }
    let ox = boxes.iter().map(|b| b.x0).fold(f64::INFINITY, f64::min);
    let oy = boxes.iter().map(|b| b.y0).fold(f64::INFINITY, f64::min);
    let lattice = |v: f64, origin: f64, what: &str, idx: usize| -> Result<i64, MeshError> {
        nearly_integer((v - origin) / h).ok_or_else(|| {
            MeshError::Generator(format!(
                "gate box {idx}: {what} = {v:.3e} m is not on the h = {h:.3e} m lattice"
            ))
        })
    };
    let mut mesher = LatticeMesher::new(Vec3::new(ox, oy, 0.0), Vec3::new(h, h, h));
    for (idx, b) in boxes.iter().enumerate() {
        let i0 = lattice(b.x0, ox, "x0", idx)?;
        let i1 = lattice(b.x1, ox, "x1", idx)?;
        let j0 = lattice(b.y0, oy, "y0", idx)?;
        let j1 = lattice(b.y1, oy, "y1", idx)?;
        let nz = nearly_integer(b.class.thickness() / h).ok_or_else(|| {
            MeshError::Generator(format!(
                "gate box {idx}: thickness {:.3e} m is not a multiple of h = {h:.3e} m",
                b.class.thickness()
            ))
        })?;
        for i in i0..i1 {
            for j in j0..j1 {
                for k in -nz..0 {
                    mesher.add_cell((i, j, k), 0);
                }
            }
        }
    }
    let mut materials = BTreeMap::new();
    materials.insert(0, material);
    mesher.finish(materials, super::DEFAULT_MAX_TETS)
}

/// Orient a tet's nodes for positive signed volume (used by generators and
/// refinement).
pub(crate) fn orient_positive(nodes: &[Vec3], tet: &mut [usize; 4]) {
    let v = [nodes[tet[0]], nodes[tet[1]], nodes[tet[2]], nodes[tet[3]]];
    if signed_volume(&v) < 0.0 {
        tet.swap(2, 3);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_cube_six_tets() {
        let m = generate_box((1.0, 1.0, 1.0), 1.0, Material::vacuum()).unwrap();
        assert_eq!(m.tet_count(), 6);
        assert_relative_eq!(m.total_volume(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn halving_h_multiplies_tets_by_eight() {
        let m1 = generate_box((1.0, 1.0, 1.0), 0.5, Material::vacuum()).unwrap();
        let m2 = generate_box((1.0, 1.0, 1.0), 0.25, Material::vacuum()).unwrap();
        assert_eq!(m2.tet_count(), 8 * m1.tet_count());
    }

    #[test]
    fn rejects_h_larger_than_a_dimension() {
        assert!(generate_box((1.0, 1.0, 0.1), 0.5, Material::vacuum()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn box_volume_conserved(
            lx in 0.5f64..2.0, ly in 0.5f64..2.0, lz in 0.5f64..2.0, frac in 0.5f64..1.0,
        ) {
            let h = frac * lx.min(ly).min(lz);
            let m = generate_box((lx, ly, lz), h, Material::vacuum()).unwrap();
            let vol = m.total_volume();
            prop_assert!((vol - lx * ly * lz).abs() <= 1e-12 * (lx * ly * lz));
        }
    }

    #[test]
    fn patch_array_matches_single_box_up_to_translation() {
        let (a, t, h) = (90e-9, 30e-9, 30e-9);
        let single = generate_box((a, a, t), h, Material::silver_room()).unwrap();
        let array = generate_patch_array(a, 60e-9, t, 1, h, Material::silver_room()).unwrap();
        assert_eq!(array.tet_count(), single.tet_count());
        assert_eq!(array.node_count(), single.node_count());
        let shift = Vec3::new(-a / 2.0, -a / 2.0, -t);
        for (p, q) in single.nodes().iter().zip(array.nodes()) {
            assert_relative_eq!((p + shift - q).norm(), 0.0, epsilon = 1e-20);
        }
    }

    #[test]
    fn patch_array_pitch_and_volume() {
        let (a, b, t, h) = (90e-9, 60e-9, 30e-9, 30e-9);
        let m = generate_patch_array(a, b, t, 2, h, Material::silver_room()).unwrap();
        assert_relative_eq!(m.total_volume(), 4.0 * a * a * t, max_relative = 1e-12);
        // pitch between patch min-corners is a + b = 150 nm
        let xs: Vec<f64> = m.nodes().iter().map(|p| p.x).collect();
        let min_x = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_x = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(max_x - min_x, a + (a + b), max_relative = 1e-12);
        // tops coplanar at z = 0
        let max_z = m.nodes().iter().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(max_z, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn patch_array_rejects_nonpositive_gap() {
        assert!(generate_patch_array(90e-9, 0.0, 30e-9, 2, 30e-9, Material::vacuum()).is_err());
    }

    #[test]
    fn gate_layout_single_box_matches_generate_box() {
        let h = 50e-9;
        let boxes = [GateBox { x0: 0.0, x1: 200e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thin }];
        let layout = generate_gate_layout(&boxes, h, Material::aluminum_cryo()).unwrap();
        let boxed = generate_box((200e-9, 100e-9, GATE_THIN_M), h, Material::aluminum_cryo()).unwrap();
        assert_eq!(layout.tet_count(), boxed.tet_count());
        assert_relative_eq!(layout.total_volume(), boxed.total_volume(), max_relative = 1e-12);
    }

    #[test]
    fn abutting_boxes_share_full_face_of_nodes() {
        let h = 50e-9;
        let boxes = [
            GateBox { x0: 0.0, x1: 100e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thin },
            GateBox { x0: 100e-9, x1: 200e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thin },
        ];
        let m = generate_gate_layout(&boxes, h, Material::aluminum_cryo()).unwrap();
        // conformality is validated at construction; welding means the node
        // count is below two independent boxes
        let single =
            generate_box((100e-9, 100e-9, GATE_THIN_M), h, Material::aluminum_cryo()).unwrap();
        assert!(m.node_count() < 2 * single.node_count());
        assert_relative_eq!(m.total_volume(), 2.0 * 100e-9 * 100e-9 * GATE_THIN_M, max_relative = 1e-12);
        // interface plane x = 100 nm carries shared nodes
        let shared = m.nodes().iter().filter(|p| (p.x - 100e-9).abs() < 1e-15).count();
        assert_eq!(shared, 3 * 3); // (ny+1) x (nz+1) lattice nodes on the interface
    }

    #[test]
    fn gate_layout_rejects_partial_overlap() {
        let boxes = [
            GateBox { x0: 0.0, x1: 100e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thin },
            GateBox { x0: 50e-9, x1: 150e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thin },
        ];
        let err = generate_gate_layout(&boxes, 50e-9, Material::vacuum()).unwrap_err();
        assert!(matches!(err, MeshError::OverlappingBoxes { a: 0, b: 1 }));
    }

    #[test]
    fn default_layout_bounding_box() {
        let m = generate_gate_layout(&default_gate_layout(), 50e-9, Material::aluminum_cryo())
            .unwrap();
        let (lo, hi) = m.bounding_box();
        let d = hi - lo;
        assert_relative_eq!(d.x, 1200e-9, max_relative = 1e-9);
        assert_relative_eq!(d.y, 650e-9, max_relative = 1e-9);
        assert_relative_eq!(d.z, 150e-9, max_relative = 1e-9);
        assert_relative_eq!(hi.z, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn mixed_thickness_layout_is_conformal() {
        // thin next to thick: interface welds over the shared depth
        let h = 50e-9;
        let boxes = [
            GateBox { x0: 0.0, x1: 100e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thin },
            GateBox { x0: 100e-9, x1: 200e-9, y0: 0.0, y1: 100e-9, class: ThicknessClass::Thick },
        ];
        let m = generate_gate_layout(&boxes, h, Material::aluminum_cryo()).unwrap();
        let expected =
            100e-9 * 100e-9 * GATE_THIN_M + 100e-9 * 100e-9 * GATE_THICK_M;
        assert_relative_eq!(m.total_volume(), expected, max_relative = 1e-12);
    }
}
