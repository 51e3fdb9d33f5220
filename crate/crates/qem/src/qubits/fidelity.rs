//! State-averaged gate fidelity under electromagnetic noise.

use nalgebra::DMatrix;

use crate::linalg::trace_product;
use crate::Complex;

use super::density::DensityMatrix;
use super::evolve::{evolve, EvolveOptions, PiecewiseHamiltonian};
use super::lindblad::LindbladGenerator;
use super::QubitError;

/// A quantum gate: ideal unitary, duration, control schedule, and the pure
/// initial states averaged over.
#[derive(Debug, Clone)]
pub struct GateSpec {
    pub ideal_unitary: DMatrix<Complex>,
    pub duration: f64,
    pub control: PiecewiseHamiltonian,
    pub initial_states: Vec<DensityMatrix>,
}

impl GateSpec {
    /// Idle gate of the given duration over a state set.
    pub fn idle(dim: usize, duration: f64, initial_states: Vec<DensityMatrix>) -> Self {
        Self {
            ideal_unitary: DMatrix::<Complex>::identity(dim, dim),
            duration,
            control: PiecewiseHamiltonian::free(),
            initial_states,
        }
    }

    fn check(&self) -> Result<(), QubitError> {
        let n = self.ideal_unitary.nrows();
        let uu = &self.ideal_unitary * self.ideal_unitary.adjoint();
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { Complex::from(1.0) } else { Complex::from(0.0) };
                defect = defect.max((uu[(i, j)] - want).norm());
            }
        }
        if defect > 1e-10 {
            return Err(QubitError::NotUnitary(defect));
        }
        if self.initial_states.is_empty() {
            return Err(QubitError::InvalidState("empty initial-state set".into()));
        }
        for rho in &self.initial_states {
            let purity = rho.purity();
            if (purity - 1.0).abs() > 1e-9 {
                return Err(QubitError::NotPure(purity));
            }
            if rho.dim() != n {
                return Err(QubitError::DimensionMismatch(format!(
                    "initial state dim {} vs unitary dim {}",
                    rho.dim(),
                    n
                )));
            }
        }
        Ok(())
    }
}

/// Average fidelity `F = <Tr[rho(t_f) rho_ideal(t_f)]>` over the gate's
/// initial-state set, with the noisy evolution under the master equation and
/// the ideal state `U rho0 U^H`.
pub fn gate_fidelity(
    gate: &GateSpec,
    generator: &LindbladGenerator,
    dt: f64,
) -> Result<f64, QubitError> {
    gate.check()?;
    let mut total = 0.0;
    for rho0 in &gate.initial_states {
        let traj = evolve(
            rho0,
            &gate.control,
            gate.duration,
            generator,
            &EvolveOptions { dt, store_every: usize::MAX },
        )?;
        let noisy = traj.final_state();
        let ideal = &gate.ideal_unitary * rho0.matrix() * gate.ideal_unitary.adjoint();
        let overlap = trace_product(noisy.matrix(), &ideal);
        total += overlap.re;
    }
    Ok(total / gate.initial_states.len() as f64)
}
