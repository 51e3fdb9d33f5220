//! Spin-qubit description and derived magnetic transition moments.

use crate::constants::SI;
use crate::{CVec3, Complex, Vec3};

use super::QubitError;

/// One spin qubit: position, splitting frequency, quantization axis, and
/// moment magnitudes.
#[derive(Debug, Clone)]
pub struct QubitSpec {
    pub position: Vec3,
    /// Splitting frequency omega_i, rad/s.
    pub frequency: f64,
    /// Unit quantization axis.
    pub axis: Vec3,
    /// Transverse transition moment magnitude |m^eg|, J/T.
    pub transverse_moment: f64,
    /// Longitudinal moment magnitude |m_par|, J/T.
    pub longitudinal_moment: f64,
}

impl QubitSpec {
    pub fn new(
        position: Vec3,
        frequency: f64,
        axis: Vec3,
        transverse_moment: f64,
        longitudinal_moment: f64,
    ) -> Result<Self, QubitError> {
        if frequency <= 0.0 {
            return Err(QubitError::NonPositiveFrequency(frequency));
        }
        let norm = axis.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QubitError::NonUnitAxis(norm));
        }
        Ok(Self { position, frequency, axis, transverse_moment, longitudinal_moment })
    }

    /// Electron-spin defaults: both moments one Bohr magneton.
    pub fn electron(position: Vec3, frequency: f64, axis: Vec3) -> Result<Self, QubitError> {
        Self::new(position, frequency, axis, SI.mu_bohr, SI.mu_bohr)
    }

    /// Right-handed orthonormal transverse frame `(e1, e2)` with
    /// `e1 x e2 = axis`, chosen deterministically from the axis.
    pub fn transverse_frame(&self) -> (Vec3, Vec3) {
        // seed with the global axis least aligned with n
        let n = self.axis;
        let seed = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
            Vec3::new(1.0, 0.0, 0.0)
        } else if n.y.abs() <= n.z.abs() {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let e1 = (seed - n * seed.dot(&n)).normalize();
        let e2 = n.cross(&e1);
        (e1, e2)
    }

    /// Transition moment `m^eg = |m^eg| (e1 - i e2)/sqrt(2)`; the circular
    /// transverse combination, orthogonal to the axis by construction.
    pub fn m_eg(&self) -> CVec3 {
        let (e1, e2) = self.transverse_frame();
        let s = self.transverse_moment / std::f64::consts::SQRT_2;
        CVec3::new(
            Complex::new(e1.x * s, -e2.x * s),
            Complex::new(e1.y * s, -e2.y * s),
            Complex::new(e1.z * s, -e2.z * s),
        )
    }

    /// `m^ge = conj(m^eg)`.
    pub fn m_ge(&self) -> CVec3 {
        self.m_eg().map(|z| z.conj())
    }

    /// Longitudinal moment `|m_par| n`.
    pub fn m_parallel(&self) -> Vec3 {
        self.axis * self.longitudinal_moment
    }
}
