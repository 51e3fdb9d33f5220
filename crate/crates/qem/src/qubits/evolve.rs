//! Fixed-step RK4 integration of the quantum master equation
//! `d rho/dt = -(i/hbar)[H_u(t), rho] + L_r[rho] + L_phi(t)[rho]`,
//! with invariant checks along the trajectory.

use nalgebra::DMatrix;

use crate::constants::SI;
use crate::linalg::hermitian_eigenvalues;
use crate::Complex;

use super::density::{DensityMatrix, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};
use super::lindblad::LindbladGenerator;
use super::QubitError;

/// Piecewise-constant control Hamiltonian (J). Segment `k` is active for
/// `t < t_end[k]`; beyond the last segment the Hamiltonian is zero.
#[derive(Debug, Clone, Default)]
pub struct PiecewiseHamiltonian {
    segments: Vec<(f64, DMatrix<Complex>)>,
}

impl PiecewiseHamiltonian {
    /// Free evolution (H = 0).
    pub fn free() -> Self {
        Self { segments: Vec::new() }
    }

    /// Build from `(t_end, H)` pairs with ascending end times. Each piece
    /// must be Hermitian within 1e-12 of its own scale.
    pub fn new(segments: Vec<(f64, DMatrix<Complex>)>) -> Result<Self, QubitError> {
        for (index, (_, h)) in segments.iter().enumerate() {
            let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
            let mut asym = 0.0f64;
            for i in 0..h.nrows() {
                for j in 0..h.ncols() {
                    asym = asym.max((h[(i, j)] - h[(j, i)].conj()).norm());
                }
            }
            if asym > 1e-12 * scale {
                return Err(QubitError::NonHermitianControl { index, asym });
            }
        }
        Ok(Self { segments })
    }

    /// Constant Hamiltonian for the whole duration.
    pub fn constant(h: DMatrix<Complex>, duration: f64) -> Result<Self, QubitError> {
        Self::new(vec![(duration, h)])
    }

    pub fn at(&self, t: f64) -> Option<&DMatrix<Complex>> {
        self.segments.iter().find(|(t_end, _)| t < *t_end).map(|(_, h)| h)
    }

    pub fn is_free(&self) -> bool {
        self.segments.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Fixed RK4 step, seconds.
    pub dt: f64,
    /// Keep every k-th state in the trajectory (the final state is always
    /// kept).
    pub store_every: usize,
}

impl EvolveOptions {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, store_every: 1 }
    }
}

/// Stored evolution history.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

fn master_rhs(
    rho: &DMatrix<Complex>,
    t: f64,
    control: &PiecewiseHamiltonian,
    generator: &LindbladGenerator,
) -> Result<DMatrix<Complex>, QubitError> {
    let mut out = generator.apply(rho, t)?;
    if let Some(h) = control.at(t) {
        // -(i/hbar) [H, rho]
        let comm = h * rho - rho * h;
        out += comm * Complex::new(0.0, -1.0 / SI.hbar);
    }
    Ok(out)
}

/// Integrate the master equation from `rho0` over `[0, duration]`.
///
/// Classical fixed-step RK4; the step count is `round(duration/dt)` with the
/// step adjusted to land exactly on `duration`. State invariants
/// (Hermiticity, trace, positivity) are checked every step and violation
/// aborts with an error naming the time.
pub fn evolve(
    rho0: &DensityMatrix,
    control: &PiecewiseHamiltonian,
    duration: f64,
    generator: &LindbladGenerator,
    opts: &EvolveOptions,
) -> Result<Trajectory, QubitError> {
    if !(opts.dt > 0.0) || duration < 0.0 || duration / opts.dt > 1e7 {
        return Err(QubitError::BadTimeStep { dt: opts.dt, duration });
    }
    rho0.check()?;
    if rho0.dim() != generator.dim() {
        return Err(QubitError::DimensionMismatch(format!(
            "state dim {} vs generator dim {}",
            rho0.dim(),
            generator.dim()
        )));
    }
    let steps = (duration / opts.dt).round().max(1.0) as usize;
    let dt = if duration > 0.0 { duration / steps as f64 } else { 0.0 };
    let store_every = opts.store_every.max(1);

    let mut rho = rho0.matrix().clone();
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    if duration == 0.0 {
        return Ok(Trajectory { times, states });
    }
    for step in 0..steps {
        let t = step as f64 * dt;
        let k1 = master_rhs(&rho, t, control, generator)?;
        let k2 = master_rhs(&(&rho + &k1 * Complex::from(dt / 2.0)), t + dt / 2.0, control, generator)?;
        let k3 = master_rhs(&(&rho + &k2 * Complex::from(dt / 2.0)), t + dt / 2.0, control, generator)?;
        let k4 = master_rhs(&(&rho + &k3 * Complex::from(dt)), t + dt, control, generator)?;
        rho += (k1 + k2 * Complex::from(2.0) + k3 * Complex::from(2.0) + k4)
            * Complex::from(dt / 6.0);
        let t_next = t + dt;
        check_invariants(&rho, t_next)?;
        if (step + 1) % store_every == 0 || step + 1 == steps {
            times.push(t_next);
            states.push(DensityMatrix::from_unchecked(rho.clone()));
        }
    }
    Ok(Trajectory { times, states })
}

fn check_invariants(rho: &DMatrix<Complex>, t: f64) -> Result<(), QubitError> {
    let n = rho.nrows();
    let mut herm = 0.0f64;
    let mut tr = Complex::from(0.0);
    for i in 0..n {
        tr += rho[(i, i)];
        for j in 0..n {
            herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    if herm > HERMITICITY_TOL {
        return Err(QubitError::InvariantViolated {
            time: t,
            what: format!("Hermiticity defect {herm:.3e}"),
        });
    }
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(QubitError::InvariantViolated { time: t, what: format!("trace {tr}") });
    }
    let eigs = hermitian_eigenvalues(rho);
    if eigs[0] < -POSITIVITY_TOL {
        return Err(QubitError::InvariantViolated {
            time: t,
            what: format!("eigenvalue {:.3e}", eigs[0]),
        });
    }
    Ok(())
}
