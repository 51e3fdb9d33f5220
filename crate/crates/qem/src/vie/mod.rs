//! D-field volume integral equation on tetrahedral meshes: SWG basis
//! enumeration, Galerkin assembly with singularity subtraction, dense direct
//! factorization, and scattered-field recovery.

mod assemble;
mod dump;
mod fields;
mod rhs;
mod singular;
mod swg;
mod system;

pub use assemble::{assemble, AssemblyOptions};
pub use dump::{read_matrix_dump, read_vector_dump, write_matrix_dump, write_vector_dump};
pub use fields::{scattered_e, scattered_h, VieSolution};
pub use rhs::{assemble_rhs, RhsSource};
pub use swg::{build_swg_space, SwgSpace, SwgUnknown};
pub use system::{factorization_count, factorize, solve, VieSystem};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VieError {
    #[error("mesh has no tets with nonvacuum material (empty scatterer)")]
    EmptyScatterer,
    #[error("frequency must be > 0, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("dense matrix would take {bytes} bytes, above the cap of {cap}")]
    MatrixTooLarge { bytes: usize, cap: usize },
    #[error("system is not factorized; call factorize first")]
    NotFactorized,
    #[error("matrix is numerically singular (pivot {pivot:.3e} below {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("solve residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
    #[error("source point {0:?} lies inside a scatterer tet")]
    SourceInsideMesh(crate::Vec3),
    #[error("observation point {point:?} is inside or within {limit:.3e} m of a tet")]
    ObservationTooClose { point: crate::Vec3, limit: f64 },
    #[error("rhs length {got} does not match unknown count {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad dump file {path}: {message}")]
    BadDump { path: String, message: String },
}
