//! Conformal local refinement of tetrahedral meshes.
//!
//! Tets whose centroid falls inside the target ball are refined "red" with a
//! principal-lattice subdivision of order `factor` (f^3 sub-tets), laid out
//! consistently by sorting each tet's vertices by global node id (Freudenthal
//! split in the sorted frame), so shared faces of red tets subdivide
//! identically on both sides. Remaining tets with hanging nodes get "green"
//! closures:
//!
//! - exactly one subdivided edge: fan split into `f` tets;
//! - exactly the three edges of one face: cone the face's lattice
//!   triangulation to the opposite vertex (f^2 tets);
//! - any other pattern: the tet is promoted to red and the closure pass
//!   repeats.
//!
//! Promotion is monotone, so the pass terminates; every produced point is
//! keyed canonically (edge/face + lattice index), so neighbors agree
//! bit-exactly and the result passes full conformality validation.

use std::collections::{HashMap, HashSet};

use crate::Vec3;

use super::generate::orient_positive;
use super::tetmesh::DEFAULT_MAX_TETS;
use super::{MeshError, TetMesh};

const TET_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
// Local faces as vertex triples (complement of each local vertex).
const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Canonical subdivision-point key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PointKey {
    /// Point at fraction i/f from node `a` to node `b`, a < b.
    Edge(usize, usize, i64),
    /// Interior face lattice point with barycentric (i, j) on sorted (a, b, c).
    Face(usize, usize, usize, i64, i64),
    /// Tet-interior lattice point (never shared).
    Interior(usize, i64, i64, i64),
}

struct Builder {
    f: i64,
    nodes: Vec<Vec3>,
    ids: HashMap<PointKey, usize>,
}

impl Builder {
    /// Point at fraction `i`/f along a -> b (0 < i < f), deduplicated.
    fn edge_point(&mut self, a: usize, b: usize, i: i64) -> usize {
        let (key, lo, hi, idx) =
            if a < b { (PointKey::Edge(a, b, i), a, b, i) } else { (PointKey::Edge(b, a, self.f - i), b, a, self.f - i) };
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let f = self.f as f64;
        let p = self.nodes[lo] * ((self.f - idx) as f64 / f) + self.nodes[hi] * (idx as f64 / f);
        let id = self.nodes.len();
        self.nodes.push(p);
        self.ids.insert(key, id);
        id
    }

    /// Interior lattice point of face with sorted corners (a < b < c).
    fn face_point(&mut self, a: usize, b: usize, c: usize, i: i64, j: i64, k: i64) -> usize {
        debug_assert!(a < b && b < c && i > 0 && j > 0 && k > 0);
        let key = PointKey::Face(a, b, c, i, j);
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let f = self.f as f64;
        let p = self.nodes[a] * (i as f64 / f)
            + self.nodes[b] * (j as f64 / f)
            + self.nodes[c] * (k as f64 / f);
        let id = self.nodes.len();
        self.nodes.push(p);
        self.ids.insert(key, id);
        id
    }

    fn interior_point(&mut self, tet: usize, s: &[usize; 4], bc: [i64; 4]) -> usize {
        let key = PointKey::Interior(tet, bc[0], bc[1], bc[2]);
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let f = self.f as f64;
        let p = self.nodes[s[0]] * (bc[0] as f64 / f)
            + self.nodes[s[1]] * (bc[1] as f64 / f)
            + self.nodes[s[2]] * (bc[2] as f64 / f)
            + self.nodes[s[3]] * (bc[3] as f64 / f);
        let id = self.nodes.len();
        self.nodes.push(p);
        self.ids.insert(key, id);
        id
    }

    /// Node id for barycentric lattice point `bc` (sum = f) on the sorted
    /// vertex frame `s` of tet `tet`.
    fn lattice_node(&mut self, tet: usize, s: &[usize; 4], bc: [i64; 4]) -> usize {
        let support: Vec<usize> = (0..4).filter(|&m| bc[m] > 0).collect();
        match support.len() {
            1 => s[support[0]],
            2 => {
                let (a, b) = (s[support[0]], s[support[1]]);
                // weight on b measured from a
                self.edge_point(a, b, bc[support[1]])
            }
            3 => {
                let (a, b, c) = (s[support[0]], s[support[1]], s[support[2]]);
                self.face_point(a, b, c, bc[support[0]], bc[support[1]], bc[support[2]])
            }
            _ => self.interior_point(tet, s, bc),
        }
    }
}

/// Sub-simplices of the order-f principal-lattice split of the reference tet,
/// as barycentric integer quadruples.
fn kuhn_subdivision_3d(f: i64) -> Vec<[[i64; 4]; 4]> {
    let perms: [[usize; 3]; 6] =
        [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let ok = |w: &[i64; 3]| f >= w[0] && w[0] >= w[1] && w[1] >= w[2] && w[2] >= 0;
    let to_bc = |w: &[i64; 3]| [f - w[0], w[0] - w[1], w[1] - w[2], w[2]];
    let mut out = Vec::new();
    for cx in 0..f {
        for cy in 0..f {
            for cz in 0..f {
                for perm in perms {
                    let mut verts = [[cx, cy, cz]; 4];
                    let mut acc = [cx, cy, cz];
                    for (m, &axis) in perm.iter().enumerate() {
                        acc[axis] += 1;
                        verts[m + 1] = acc;
                    }
                    if verts.iter().all(ok) {
                        out.push([to_bc(&verts[0]), to_bc(&verts[1]), to_bc(&verts[2]), to_bc(&verts[3])]);
                    }
                }
            }
        }
    }
    out
}

/// Triangles of the order-f lattice split of the reference triangle.
fn kuhn_subdivision_2d(f: i64) -> Vec<[[i64; 3]; 3]> {
    let ok = |u: &[i64; 2]| f >= u[0] && u[0] >= u[1] && u[1] >= 0;
    let to_bc = |u: &[i64; 2]| [f - u[0], u[0] - u[1], u[1]];
    let mut out = Vec::new();
    for cu in 0..f {
        for cv in 0..f {
            for perm in [[0usize, 1], [1, 0]] {
                let mut verts = [[cu, cv]; 3];
                let mut acc = [cu, cv];
                for (m, &axis) in perm.iter().enumerate() {
                    acc[axis] += 1;
                    verts[m + 1] = acc;
                }
                if verts.iter().all(ok) {
                    out.push([to_bc(&verts[0]), to_bc(&verts[1]), to_bc(&verts[2])]);
                }
            }
        }
    }
    out
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Refine all tets whose centroid lies within `radius` of `center` by a
/// factor-`factor` regular subdivision, with conformal green transitions.
/// Total volume is preserved; the output passes full mesh validation.
pub fn refine_region(
    mesh: &TetMesh,
    center: Vec3,
    radius: f64,
    factor: u32,
) -> Result<TetMesh, MeshError> {
    if !(2..=4).contains(&factor) {
        return Err(MeshError::Generator(format!(
            "refinement factor must be 2, 3, or 4, got {factor}"
        )));
    }
    let f = factor as i64;
    let n_tets = mesh.tet_count();
    let mut red = vec![false; n_tets];
    for i in 0..n_tets {
        if (mesh.tet_centroid(i) - center).norm() <= radius {
            red[i] = true;
        }
    }
    if !red.iter().any(|&r| r) {
        return Ok(mesh.clone());
    }

    // Red-closure fixpoint: promote any tet whose hanging-edge pattern has no
    // green template.
    let max_passes = n_tets + 2;
    let mut passes = 0;
    loop {
        passes += 1;
        if passes > max_passes {
            return Err(MeshError::RefinementConflict(
                "red-closure failed to reach a fixpoint".into(),
            ));
        }
        let mut sub_edges: HashSet<(usize, usize)> = HashSet::new();
        for (i, tet) in mesh.tets().iter().enumerate() {
            if red[i] {
                for (a, b) in TET_EDGES {
                    sub_edges.insert(sorted_pair(tet[a], tet[b]));
                }
            }
        }
        let mut changed = false;
        for (i, tet) in mesh.tets().iter().enumerate() {
            if red[i] {
                continue;
            }
            let marked: Vec<(usize, usize)> = TET_EDGES
                .iter()
                .map(|&(a, b)| (a, b))
                .filter(|&(a, b)| sub_edges.contains(&sorted_pair(tet[a], tet[b])))
                .collect();
            let green_ok = match marked.len() {
                0 | 1 => true,
                3 => TET_FACES.iter().any(|face| {
                    marked.iter().all(|&(a, b)| face.contains(&a) && face.contains(&b))
                }),
                _ => false,
            };
            if !green_ok {
                red[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut sub_edges: HashSet<(usize, usize)> = HashSet::new();
    for (i, tet) in mesh.tets().iter().enumerate() {
        if red[i] {
            for (a, b) in TET_EDGES {
                sub_edges.insert(sorted_pair(tet[a], tet[b]));
            }
        }
    }

    let mut builder = Builder { f, nodes: mesh.nodes().to_vec(), ids: HashMap::new() };
    let mut new_tets: Vec<[usize; 4]> = Vec::new();
    let mut new_regions: Vec<u32> = Vec::new();
    let sub3 = kuhn_subdivision_3d(f);
    let sub2 = kuhn_subdivision_2d(f);

    for (i, tet) in mesh.tets().iter().enumerate() {
        let region = mesh.regions()[i];
        if red[i] {
            let mut s = *tet;
            s.sort_unstable();
            for cell in &sub3 {
                let mut t = [0usize; 4];
                for (slot, bc) in t.iter_mut().zip(cell) {
                    *slot = builder.lattice_node(i, &s, *bc);
                }
                orient_positive(&builder.nodes, &mut t);
                new_tets.push(t);
                new_regions.push(region);
            }
            continue;
        }
        let marked: Vec<(usize, usize)> = TET_EDGES
            .iter()
            .map(|&(a, b)| (a, b))
            .filter(|&(a, b)| sub_edges.contains(&sorted_pair(tet[a], tet[b])))
            .collect();
        match marked.len() {
            0 => {
                new_tets.push(*tet);
                new_regions.push(region);
            }
            1 => {
                // Fan around the single subdivided edge.
                let (la, lb) = marked[0];
                let (a, b) = (tet[la], tet[lb]);
                let others: Vec<usize> =
                    (0..4).filter(|&m| m != la && m != lb).map(|m| tet[m]).collect();
                let mut chain = vec![a];
                for step in 1..f {
                    chain.push(builder.edge_point(a, b, step));
                }
                chain.push(b);
                for w in chain.windows(2) {
                    let mut t = [w[0], w[1], others[0], others[1]];
                    orient_positive(&builder.nodes, &mut t);
                    new_tets.push(t);
                    new_regions.push(region);
                }
            }
            3 => {
                // Cone the subdivided face's lattice triangulation to the
                // opposite vertex.
                let face = TET_FACES
                    .iter()
                    .find(|face| {
                        marked.iter().all(|&(a, b)| face.contains(&a) && face.contains(&b))
                    })
                    .expect("pattern validated in closure pass");
                let apex_local = (0..4).find(|m| !face.contains(m)).unwrap();
                let apex = tet[apex_local];
                let mut fs = [tet[face[0]], tet[face[1]], tet[face[2]]];
                fs.sort_unstable();
                for tri in &sub2 {
                    let mut corners = [0usize; 3];
                    for (slot, bc) in corners.iter_mut().zip(tri) {
                        let support: Vec<usize> = (0..3).filter(|&m| bc[m] > 0).collect();
                        *slot = match support.len() {
                            1 => fs[support[0]],
                            2 => builder.edge_point(
                                fs[support[0]],
                                fs[support[1]],
                                bc[support[1]],
                            ),
                            _ => builder.face_point(fs[0], fs[1], fs[2], bc[0], bc[1], bc[2]),
                        };
                    }
                    let mut t = [corners[0], corners[1], corners[2], apex];
                    orient_positive(&builder.nodes, &mut t);
                    new_tets.push(t);
                    new_regions.push(region);
                }
            }
            _ => {
                return Err(MeshError::RefinementConflict(format!(
                    "tet {i} left with {} hanging edges after closure",
                    marked.len()
                )));
            }
        }
    }

    TetMesh::with_cap(
        builder.nodes,
        new_tets,
        new_regions,
        mesh.materials().clone(),
        DEFAULT_MAX_TETS.max(mesh.tet_count()),
    )
}
