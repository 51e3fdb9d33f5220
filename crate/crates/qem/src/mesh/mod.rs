//! Conformal tetrahedral meshes of lossy bodies: validation, structured
//! generators (slabs, patch arrays, gate layouts), local refinement, and
//! file import/export.

mod generate;
mod io;
mod material;
mod refine;
mod tetmesh;

pub use generate::{
    default_gate_layout, generate_box, generate_box_with_cap, generate_gate_layout,
    generate_patch_array, GateBox, ThicknessClass, GATE_THICK_M, GATE_THIN_M,
};
pub use io::{load_mesh, save_mesh, MeshFormat};
pub use material::Material;
pub use refine::refine_region;
pub use tetmesh::{point_in_tet, signed_volume, FaceKey, TetMesh, DEFAULT_MAX_TETS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("tet {index} has non-positive signed volume {volume:.3e} m^3")]
    NonPositiveVolume { index: usize, volume: f64 },
    #[error("tet {index} references node {node} out of range ({nodes} nodes)")]
    NodeOutOfRange { index: usize, node: usize, nodes: usize },
    #[error("face {face:?} is shared by {count} tets (conformality requires <= 2)")]
    NonconformalFace { face: [usize; 3], count: usize },
    #[error("tet {index} references region {region} with no material entry")]
    MissingMaterial { index: usize, region: u32 },
    #[error("nodes {a} and {b} coincide within 1e-12 m")]
    DuplicateNodes { a: usize, b: usize },
    #[error("mesh has {tets} tets, above the configured cap of {cap}")]
    TooManyTets { tets: usize, cap: usize },
    #[error("mesh has no tets")]
    Empty,
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("generator: {0}")]
    Generator(String),
    #[error("boxes {a} and {b} partially overlap")]
    OverlappingBoxes { a: usize, b: usize },
    #[error("refinement cannot preserve conformality: {0}")]
    RefinementConflict(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
}
