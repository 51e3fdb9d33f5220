//! Spin-qubit noise modeling: relaxation/dephasing rates from magnetic Green
//! tensors, Lindblad generators, master-equation evolution, gate fidelity,
//! and T1 conversion.

mod dephasing;
mod density;
mod evolve;
mod fidelity;
mod lindblad;
mod qubit;
mod rates;

pub use dephasing::{DephasingModel, DephasingSpectrum};
pub use density::DensityMatrix;
pub use evolve::{evolve, EvolveOptions, PiecewiseHamiltonian, Trajectory};
pub use fidelity::{gate_fidelity, GateSpec};
pub use lindblad::{build_lindblad, LindbladGenerator};
pub use qubit::QubitSpec;
pub use rates::{relaxation_rates, t1_from_rate, RateSet};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QubitError {
    #[error("quantization axis must be a unit vector (|n| = {0})")]
    NonUnitAxis(f64),
    #[error("qubit frequency must be > 0, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("relaxation matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitianRates(f64),
    #[error("diagonal relaxation rate must be > 0, got {0}")]
    NonPositiveRate(f64),
    #[error("dephasing spectrum must cover the cutoff {cutoff:.3e} rad/s (grid ends at {grid_end:.3e})")]
    SpectrumTooShort { cutoff: f64, grid_end: f64 },
    #[error("dephasing spectrum needs at least 2 ascending positive frequencies")]
    BadSpectrumGrid,
    #[error("spectrum low-frequency extrapolation diverges (power-law exponent {0:.2})")]
    NonIntegrableSpectrum(f64),
    #[error("density matrix: {0}")]
    InvalidState(String),
    #[error("state invariant violated at t = {time:.3e} s: {what}")]
    InvariantViolated { time: f64, what: String },
    #[error("gate fidelity requires pure initial states (purity {0})")]
    NotPure(f64),
    #[error("ideal gate must be unitary (|U U^H - I| = {0:.3e})")]
    NotUnitary(f64),
    #[error("control Hamiltonian segment {index} is not Hermitian (asymmetry {asym:.3e})")]
    NonHermitianControl { index: usize, asym: f64 },
    #[error("time step must be > 0 and duration/dt <= 1e7 (got dt = {dt}, duration = {duration})")]
    BadTimeStep { dt: f64, duration: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Bath(#[from] crate::bath::BathError),
    #[error(transparent)]
    Quadrature(#[from] crate::quad::QuadError),
    #[error(transparent)]
    Greens(#[from] crate::greens::GreensError),
}
