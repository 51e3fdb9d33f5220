//! Near-field magnetic-noise electromagnetics for spin qubits.
//!
//! The crate computes low-frequency (MHz-GHz) magnetic-field fluctuation
//! spectra near nanostructured lossy conductors and converts them into
//! spin-qubit relaxation rates, dephasing rates, open-system dynamics, and
//! gate fidelities.
//!
//! Pipeline:
//!
//! 1. [`mesh`] builds or imports conformal tetrahedral meshes of lossy bodies.
//! 2. [`vie`] discretizes the D-field volume integral equation with SWG basis
//!    functions, factorizes the dense Galerkin system, and recovers scattered
//!    fields of magnetic-dipole sources.
//! 3. [`layered`] evaluates the analytic reflected magnetic dyadic Green's
//!    function above a planar film (thin-film baseline and cross-check).
//! 4. [`greens`] orchestrates dipole sweeps into 3x3 magnetic Green tensors.
//! 5. [`qubits`] maps Green tensors to relaxation/dephasing rates, Lindblad
//!    generators, master-equation trajectories, and gate fidelities.
//!
//! All internal electromagnetics use the engineering `e^{+j omega t}` time
//! convention; quantities handed to [`qubits`] are converted to the physics
//! convention (`Im G >= 0` encodes loss). See [`convention`].
//!
//! Units are strictly SI: meters, rad/s, S/m, J/T, kelvin.

pub mod bath;
pub mod constants;
pub mod convention;
pub mod freespace;
pub mod greens;
pub mod layered;
pub mod linalg;
pub mod mesh;
pub mod quad;
pub mod qubits;
pub mod vie;

pub use bath::BathSpec;
pub use constants::PhysicalConstants;
pub use convention::TimeHarmonic;

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex<f64>;

/// Real 3-vector (SI meters for positions).
pub type Vec3 = nalgebra::Vector3<f64>;

/// Complex 3-vector (fields, dipole moments).
pub type CVec3 = nalgebra::Vector3<Complex>;

/// Real 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Complex 3x3 matrix (dyadic Green tensors).
pub type CMat3 = nalgebra::Matrix3<Complex>;
