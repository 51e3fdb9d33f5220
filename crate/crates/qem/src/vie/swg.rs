//! SWG (Schaubert-Wilton-Glisson) basis enumeration on a tetrahedral mesh.
//!
//! One unknown per face: full SWG on interior faces (shared tet pair), half
//! SWG on boundary faces. Within a supporting tet the basis function is
//! `f(r) = s A/(3V) (r - v_free)` with `s = +1` on the plus tet and `-1` on
//! the minus tet, giving unit normal flux through the face and piecewise
//! constant divergence `s A / V`.

use crate::constants::SI;
use crate::mesh::TetMesh;
use crate::{Complex, Vec3};

use super::VieError;

/// One SWG unknown (face-based flux degree of freedom).
#[derive(Debug, Clone)]
pub struct SwgUnknown {
    /// Sorted node triple of the face.
    pub face: [usize; 3],
    /// Face area, m^2.
    pub area: f64,
    /// Plus-side tet (smaller tet index for interior faces).
    pub plus_tet: usize,
    /// Minus-side tet; `None` for boundary faces.
    pub minus_tet: Option<usize>,
    /// Free vertex (node id opposite the face) in the plus tet.
    pub free_plus: usize,
    /// Free vertex in the minus tet.
    pub free_minus: Option<usize>,
}

impl SwgUnknown {
    pub fn is_boundary(&self) -> bool {
        self.minus_tet.is_none()
    }
}

/// Per-tet view of the basis: which unknowns live on this tet's faces.
#[derive(Debug, Clone, Copy)]
pub struct TetFace {
    pub unknown: usize,
    /// +1 if this tet is the plus side, -1 otherwise.
    pub sign: f64,
    /// Free vertex node id in this tet.
    pub free_vertex: usize,
    /// Face area, m^2.
    pub area: f64,
}

/// SWG space at one frequency: unknown enumeration plus per-tet material
/// response.
#[derive(Debug, Clone)]
pub struct SwgSpace {
    mesh: TetMesh,
    omega: f64,
    unknowns: Vec<SwgUnknown>,
    tet_faces: Vec<[TetFace; 4]>,
    /// Contrast kappa = (eps_m - eps0)/eps_m per tet (engineering).
    kappa: Vec<Complex>,
    /// Complex permittivity per tet (engineering).
    eps: Vec<Complex>,
}

/// Enumerate SWG unknowns over the mesh at angular frequency `omega`.
///
/// Unknown ordering is deterministic: sorted by face node triple.
pub fn build_swg_space(mesh: &TetMesh, omega: f64) -> Result<SwgSpace, VieError> {
    if omega <= 0.0 {
        return Err(VieError::NonPositiveFrequency(omega));
    }
    let mut unknowns = Vec::new();
    // face_map is a BTreeMap over sorted node triples: deterministic order
    for (face, owners) in mesh.face_map() {
        debug_assert!(!owners.is_empty() && owners.len() <= 2);
        let verts = [mesh.nodes()[face[0]], mesh.nodes()[face[1]], mesh.nodes()[face[2]]];
        let area = 0.5 * (verts[1] - verts[0]).cross(&(verts[2] - verts[0])).norm();
        let mut owners = owners.clone();
        owners.sort_unstable();
        let (plus_tet, plus_local) = owners[0];
        let free_plus = mesh.tets()[plus_tet][plus_local];
        let (minus_tet, free_minus) = match owners.get(1) {
            Some(&(t, local)) => (Some(t), Some(mesh.tets()[t][local])),
            None => (None, None),
        };
        unknowns.push(SwgUnknown { face, area, plus_tet, minus_tet, free_plus, free_minus });
    }

    let placeholder =
        TetFace { unknown: usize::MAX, sign: 0.0, free_vertex: usize::MAX, area: 0.0 };
    let mut tet_faces = vec![[placeholder; 4]; mesh.tet_count()];
    let mut fill = vec![0usize; mesh.tet_count()];
    for (u, unk) in unknowns.iter().enumerate() {
        let mut place = |tet: usize, sign: f64, free_vertex: usize| {
            tet_faces[tet][fill[tet]] =
                TetFace { unknown: u, sign, free_vertex, area: unk.area };
            fill[tet] += 1;
        };
        place(unk.plus_tet, 1.0, unk.free_plus);
        if let (Some(t), Some(v)) = (unk.minus_tet, unk.free_minus) {
            place(t, -1.0, v);
        }
    }
    debug_assert!(fill.iter().all(|&c| c == 4));

    let kappa: Vec<Complex> =
        (0..mesh.tet_count()).map(|t| mesh.material_of_tet(t).contrast(omega)).collect();
    let eps: Vec<Complex> = (0..mesh.tet_count())
        .map(|t| mesh.material_of_tet(t).complex_permittivity(omega))
        .collect();

    Ok(SwgSpace { mesh: mesh.clone(), omega, unknowns, tet_faces, kappa, eps })
}

impl SwgSpace {
    pub fn mesh(&self) -> &TetMesh {
        &self.mesh
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn wavenumber(&self) -> f64 {
        SI.wavenumber(self.omega)
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    pub fn unknowns(&self) -> &[SwgUnknown] {
        &self.unknowns
    }

    pub fn tet_faces(&self, tet: usize) -> &[TetFace; 4] {
        &self.tet_faces[tet]
    }

    pub fn kappa(&self, tet: usize) -> Complex {
        self.kappa[tet]
    }

    pub fn eps(&self, tet: usize) -> Complex {
        self.eps[tet]
    }

    /// True when every tet has zero contrast (no scatterer response).
    pub fn all_vacuum(&self) -> bool {
        self.kappa.iter().all(|k| k.norm() == 0.0)
    }

    /// Evaluate SWG basis function `u` at point `p` inside tet `tet`
    /// (no containment check).
    pub fn basis_in_tet(&self, u: usize, tet: usize, p: Vec3) -> Vec3 {
        let unk = &self.unknowns[u];
        let vol = self.mesh.tet_volume(tet);
        let (sign, free) = if tet == unk.plus_tet {
            (1.0, unk.free_plus)
        } else {
            debug_assert_eq!(Some(tet), unk.minus_tet);
            (-1.0, unk.free_minus.expect("minus tet exists"))
        };
        (p - self.mesh.nodes()[free]) * (sign * unk.area / (3.0 * vol))
    }

    /// Piecewise-constant divergence of basis `u` on tet `tet`.
    pub fn basis_divergence(&self, u: usize, tet: usize) -> f64 {
        let unk = &self.unknowns[u];
        let vol = self.mesh.tet_volume(tet);
        if tet == unk.plus_tet {
            unk.area / vol
        } else {
            -unk.area / vol
        }
    }
}
