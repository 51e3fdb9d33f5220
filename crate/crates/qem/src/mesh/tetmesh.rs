//! Tetrahedral mesh container and validation.

use std::collections::{BTreeMap, HashMap};

use crate::Vec3;

use super::{Material, MeshError};

/// Default cap on tet count; dense-solve memory scales with the square of the
/// face count, so desk-scale meshes are rejected early above this.
pub const DEFAULT_MAX_TETS: usize = 60_000;

/// Duplicate-node tolerance, meters.
const NODE_TOL: f64 = 1e-12;

/// Sorted node triple identifying a face.
pub type FaceKey = [usize; 3];

/// Immutable-after-validation tetrahedral mesh with per-region materials.
#[derive(Debug, Clone)]
pub struct TetMesh {
    nodes: Vec<Vec3>,
    /// Four node indices per tet, ordered for positive signed volume.
    tets: Vec<[usize; 4]>,
    /// Region id per tet.
    regions: Vec<u32>,
    materials: BTreeMap<u32, Material>,
}

impl TetMesh {
    /// Build and validate a mesh. Tets must already be ordered for positive
    /// signed volume.
    pub fn new(
        nodes: Vec<Vec3>,
        tets: Vec<[usize; 4]>,
        regions: Vec<u32>,
        materials: BTreeMap<u32, Material>,
    ) -> Result<Self, MeshError> {
        let mesh = Self { nodes, tets, regions, materials };
        mesh.validate(DEFAULT_MAX_TETS)?;
        Ok(mesh)
    }

    /// Build with a caller-chosen tet cap.
    pub fn with_cap(
        nodes: Vec<Vec3>,
        tets: Vec<[usize; 4]>,
        regions: Vec<u32>,
        materials: BTreeMap<u32, Material>,
        max_tets: usize,
    ) -> Result<Self, MeshError> {
        let mesh = Self { nodes, tets, regions, materials };
        mesh.validate(max_tets)?;
        Ok(mesh)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tet_count(&self) -> usize {
        self.tets.len()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn regions(&self) -> &[u32] {
        &self.regions
    }

    pub fn materials(&self) -> &BTreeMap<u32, Material> {
        &self.materials
    }

    pub fn material_of_tet(&self, tet: usize) -> &Material {
        &self.materials[&self.regions[tet]]
    }

    /// Replace the material table (e.g. after file import) and re-validate
    /// region coverage.
    pub fn with_materials(mut self, materials: BTreeMap<u32, Material>) -> Result<Self, MeshError> {
        self.materials = materials;
        for (i, &r) in self.regions.iter().enumerate() {
            if !self.materials.contains_key(&r) {
                return Err(MeshError::MissingMaterial { index: i, region: r });
            }
        }
        Ok(self)
    }

    /// Vertex positions of tet `i`.
    pub fn tet_vertices(&self, i: usize) -> [Vec3; 4] {
        let t = self.tets[i];
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]], self.nodes[t[3]]]
    }

    /// Signed volume of tet `i` (positive for valid meshes).
    pub fn tet_volume(&self, i: usize) -> f64 {
        let v = self.tet_vertices(i);
        signed_volume(&v)
    }

    pub fn tet_centroid(&self, i: usize) -> Vec3 {
        let v = self.tet_vertices(i);
        (v[0] + v[1] + v[2] + v[3]) * 0.25
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|i| self.tet_volume(i)).sum()
    }

    /// Rigid translation of every node (invariants are unaffected).
    pub fn translated(mut self, shift: Vec3) -> Self {
        for p in &mut self.nodes {
            *p += shift;
        }
        self
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::from_element(f64::INFINITY);
        let mut hi = Vec3::from_element(f64::NEG_INFINITY);
        for p in &self.nodes {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }

    /// Deterministic face map: sorted node triple -> (tet, local face) list,
    /// ordered by key. Local face `k` of a tet is opposite local vertex `k`.
    pub fn face_map(&self) -> BTreeMap<FaceKey, Vec<(usize, usize)>> {
        let mut map: BTreeMap<FaceKey, Vec<(usize, usize)>> = BTreeMap::new();
        for (ti, tet) in self.tets.iter().enumerate() {
            for local in 0..4 {
                let mut face = [0usize; 3];
                let mut w = 0;
                for (v, &node) in tet.iter().enumerate() {
                    if v != local {
                        face[w] = node;
                        w += 1;
                    }
                }
                face.sort_unstable();
                map.entry(face).or_default().push((ti, local));
            }
        }
        map
    }

    /// True if `p` lies strictly inside any tet (barycentric test with a
    /// small negative slack).
    pub fn contains_point(&self, p: Vec3) -> bool {
        self.tets.iter().enumerate().any(|(i, _)| {
            let v = self.tet_vertices(i);
            point_in_tet(&v, p, -1e-12)
        })
    }

    /// Distance from `p` to the closest tet vertex (coarse proximity
    /// measure for observation-point exclusion zones).
    pub fn min_vertex_distance(&self, p: Vec3) -> f64 {
        self.nodes.iter().map(|n| (n - p).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Run all invariants: positive volumes, conformality, material coverage,
    /// duplicate nodes, and the tet cap.
    pub fn validate(&self, max_tets: usize) -> Result<(), MeshError> {
        if self.tets.is_empty() {
            return Err(MeshError::Empty);
        }
        if self.tets.len() > max_tets {
            return Err(MeshError::TooManyTets { tets: self.tets.len(), cap: max_tets });
        }
        let n = self.nodes.len();
        for (i, tet) in self.tets.iter().enumerate() {
            for &node in tet {
                if node >= n {
                    return Err(MeshError::NodeOutOfRange { index: i, node, nodes: n });
                }
            }
            let vol = self.tet_volume(i);
            if !(vol > 0.0) {
                return Err(MeshError::NonPositiveVolume { index: i, volume: vol });
            }
        }
        for (i, &r) in self.regions.iter().enumerate() {
            if !self.materials.contains_key(&r) {
                return Err(MeshError::MissingMaterial { index: i, region: r });
            }
        }
        for (face, owners) in self.face_map() {
            if owners.len() > 2 {
                return Err(MeshError::NonconformalFace { face, count: owners.len() });
            }
        }
        self.check_duplicate_nodes()?;
        Ok(())
    }

    fn check_duplicate_nodes(&self) -> Result<(), MeshError> {
        // Spatial hash with cells of NODE_TOL; collisions checked against the
        // 27-cell neighborhood.
        let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        let key = |p: &Vec3| {
            (
                (p.x / NODE_TOL).round() as i64,
                (p.y / NODE_TOL).round() as i64,
                (p.z / NODE_TOL).round() as i64,
            )
        };
        for (i, p) in self.nodes.iter().enumerate() {
            let (kx, ky, kz) = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(cands) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                            for &j in cands {
                                let d = self.nodes[j] - p;
                                if d.amax() <= NODE_TOL {
                                    return Err(MeshError::DuplicateNodes { a: j, b: i });
                                }
                            }
                        }
                    }
                }
            }
            grid.entry((kx, ky, kz)).or_default().push(i);
        }
        Ok(())
    }
}

/// Signed volume of a tetrahedron given its vertices in order.
pub fn signed_volume(v: &[Vec3; 4]) -> f64 {
    (v[1] - v[0]).cross(&(v[2] - v[0])).dot(&(v[3] - v[0])) / 6.0
}

/// Barycentric point-in-tet test; `slack <= 0` shrinks, `> 0` expands.
pub fn point_in_tet(v: &[Vec3; 4], p: Vec3, slack: f64) -> bool {
    let vol = signed_volume(v);
    if vol <= 0.0 {
        return false;
    }
    for i in 0..4 {
        let mut w = *v;
        w[i] = p;
        if signed_volume(&w) / vol < slack {
            return false;
        }
    }
    true
}
