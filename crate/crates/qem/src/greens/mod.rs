//! Magnetic dyadic Green tensor orchestration: unit-dipole sweeps over the
//! VIE backend, the layered analytic backend, and frequency/position scans
//! with factorization reuse.
//!
//! All returned tensors are the *reflected* part `G_m^r` in the physics
//! convention (`Im G >= 0` encodes loss at coincident points); the
//! free-space part is excluded by construction since only scattered fields
//! of the dipole sweep are evaluated.

use thiserror::Error;

use crate::convention::TimeHarmonic;
use crate::layered::{reflected_gm_layered, LayeredError, LayeredStack, QuadControl};
use crate::mesh::TetMesh;
use crate::vie::{
    assemble, assemble_rhs, build_swg_space, factorize, scattered_h, solve, AssemblyOptions,
    RhsSource, VieError, VieSystem,
};
use crate::{CMat3, CVec3, Complex, Vec3};

#[derive(Debug, Error)]
pub enum GreensError {
    #[error(transparent)]
    Vie(#[from] VieError),
    #[error(transparent)]
    Layered(#[from] LayeredError),
    #[error("frequency must be > 0, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("no stored sample for r_i {r_i:?}, r_j {r_j:?} at {omega:.6e} rad/s")]
    MissingSample { r_i: Vec3, r_j: Vec3, omega: f64 },
}

/// Which backend produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Vie,
    Layered,
    FreeSpace,
}

/// One magnetic Green tensor sample `G_m^r(r_i, r_j, omega)`, physics
/// convention, units 1/m.
#[derive(Debug, Clone)]
pub struct GreenSample {
    pub r_i: Vec3,
    pub r_j: Vec3,
    pub omega: f64,
    pub tensor: CMat3,
    pub provenance: Provenance,
}

impl GreenSample {
    /// Imaginary part of the tensor (the dissipative response driving
    /// relaxation and dephasing).
    pub fn im(&self) -> crate::Mat3 {
        self.tensor.map(|z| z.im)
    }
}

/// Geometry backend for Green-tensor evaluation; exactly one is active.
#[derive(Clone)]
pub enum Scene {
    Vie { mesh: TetMesh, options: AssemblyOptions },
    Layered { stack: LayeredStack, quad: QuadControl },
}

impl Scene {
    pub fn vie(mesh: TetMesh) -> Self {
        Scene::Vie { mesh, options: AssemblyOptions::default() }
    }

    pub fn layered(stack: LayeredStack) -> Self {
        Scene::Layered { stack, quad: QuadControl::default() }
    }
}

/// Scan bookkeeping for run summaries and reuse checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub factorizations: u64,
    pub solves: u64,
    pub unknown_count: usize,
    pub tet_count: usize,
}

/// A factorized VIE scene at one frequency, reusable across dipole
/// positions and axes.
pub struct PreparedVie {
    system: VieSystem,
    omega: f64,
    stats: ScanStats,
}

impl PreparedVie {
    pub fn new(mesh: &TetMesh, options: &AssemblyOptions, omega: f64) -> Result<Self, GreensError> {
        if omega <= 0.0 {
            return Err(GreensError::NonPositiveFrequency(omega));
        }
        let space = build_swg_space(mesh, omega)?;
        let mut system = assemble(&space, options)?;
        factorize(&mut system)?;
        let stats = ScanStats {
            factorizations: 1,
            solves: 0,
            unknown_count: space.unknown_count(),
            tet_count: mesh.tet_count(),
        };
        Ok(Self { system, omega, stats })
    }

    pub fn stats(&self) -> ScanStats {
        self.stats
    }

    /// Reflected Green tensor between one pair of points (physics
    /// convention). Three unit-dipole solves at `r_j`, one field evaluation
    /// at `r_i` per axis.
    pub fn tensor(&mut self, r_i: Vec3, r_j: Vec3) -> Result<CMat3, GreensError> {
        let k0 = self.system.space().wavenumber();
        let mut engineering = CMat3::zeros();
        for axis in 0..3 {
            let mut moment = CVec3::zeros();
            moment[axis] = Complex::from(1.0);
            let rhs = assemble_rhs(
                self.system.space(),
                &RhsSource::MagneticDipole { position: r_j, moment },
            )?;
            let sol = solve(&self.system, &rhs)?;
            self.stats.solves += 1;
            let h = scattered_h(self.system.space(), &sol, r_i)?;
            for row in 0..3 {
                engineering[(row, axis)] = h[row] / Complex::from(k0 * k0);
            }
        }
        Ok(TimeHarmonic::Engineering.convert_mat(TimeHarmonic::Physics, &engineering))
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Reflected magnetic Green tensor between two points at one frequency.
pub fn magnetic_green_tensor(
    scene: &Scene,
    r_i: Vec3,
    r_j: Vec3,
    omega: f64,
) -> Result<GreenSample, GreensError> {
    match scene {
        Scene::Vie { mesh, options } => {
            let mut prepared = PreparedVie::new(mesh, options, omega)?;
            let tensor = prepared.tensor(r_i, r_j)?;
            Ok(GreenSample { r_i, r_j, omega, tensor, provenance: Provenance::Vie })
        }
        Scene::Layered { stack, quad } => {
            let tensor = reflected_gm_layered(r_i, r_j, omega, stack, quad)?;
            Ok(GreenSample { r_i, r_j, omega, tensor, provenance: Provenance::Layered })
        }
    }
}

/// Evaluate many point pairs over a frequency grid with one assembly and
/// factorization per frequency (VIE backend). Results are ordered
/// frequency-major, then in input pair order.
pub fn green_scan(
    scene: &Scene,
    pairs: &[(Vec3, Vec3)],
    omegas: &[f64],
) -> Result<(Vec<GreenSample>, ScanStats), GreensError> {
    let mut out = Vec::with_capacity(pairs.len() * omegas.len());
    let mut stats = ScanStats::default();
    for &omega in omegas {
        match scene {
            Scene::Vie { mesh, options } => {
                let mut prepared = PreparedVie::new(mesh, options, omega)?;
                for &(r_i, r_j) in pairs {
                    let tensor = prepared.tensor(r_i, r_j)?;
                    out.push(GreenSample { r_i, r_j, omega, tensor, provenance: Provenance::Vie });
                }
                let s = prepared.stats();
                stats.factorizations += s.factorizations;
                stats.solves += s.solves;
                stats.unknown_count = s.unknown_count;
                stats.tet_count = s.tet_count;
            }
            Scene::Layered { stack, quad } => {
                for &(r_i, r_j) in pairs {
                    let tensor = reflected_gm_layered(r_i, r_j, omega, stack, quad)?;
                    out.push(GreenSample {
                        r_i,
                        r_j,
                        omega,
                        tensor,
                        provenance: Provenance::Layered,
                    });
                }
            }
        }
    }
    Ok((out, stats))
}

/// Source of Green samples for rate construction. Implementations may cache
/// factorizations across calls.
pub trait GreenSource {
    fn sample(&mut self, r_i: Vec3, r_j: Vec3, omega: f64) -> Result<GreenSample, GreensError>;
}

/// Scene-backed source with per-frequency factorization reuse.
pub struct SceneSource<'a> {
    scene: &'a Scene,
    cached: Option<PreparedVie>,
    pub stats: ScanStats,
}

impl<'a> SceneSource<'a> {
    pub fn new(scene: &'a Scene) -> Self {
        Self { scene, cached: None, stats: ScanStats::default() }
    }
}

impl GreenSource for SceneSource<'_> {
    fn sample(&mut self, r_i: Vec3, r_j: Vec3, omega: f64) -> Result<GreenSample, GreensError> {
        match self.scene {
            Scene::Layered { .. } => magnetic_green_tensor(self.scene, r_i, r_j, omega),
            Scene::Vie { mesh, options } => {
                let rebuild = match &self.cached {
                    Some(p) => p.omega() != omega,
                    None => true,
                };
                if rebuild {
                    let prepared = PreparedVie::new(mesh, options, omega)?;
                    self.stats.factorizations += 1;
                    self.stats.unknown_count = prepared.stats().unknown_count;
                    self.stats.tet_count = prepared.stats().tet_count;
                    self.cached = Some(prepared);
                }
                let prepared = self.cached.as_mut().expect("cached above");
                let tensor = prepared.tensor(r_i, r_j)?;
                self.stats.solves += 3;
                Ok(GreenSample { r_i, r_j, omega, tensor, provenance: Provenance::Vie })
            }
        }
    }
}

/// Precomputed sample table (e.g. from [`green_scan`]) served as a
/// [`GreenSource`]. Lookups are exact on the stored positions/frequencies.
#[derive(Default)]
pub struct MapSource {
    samples: std::collections::HashMap<SampleKey, GreenSample>,
}

type SampleKey = [u64; 7];

fn sample_key(r_i: Vec3, r_j: Vec3, omega: f64) -> SampleKey {
    [
        r_i.x.to_bits(),
        r_i.y.to_bits(),
        r_i.z.to_bits(),
        r_j.x.to_bits(),
        r_j.y.to_bits(),
        r_j.z.to_bits(),
        omega.to_bits(),
    ]
}

impl MapSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sample: GreenSample) {
        self.samples.insert(sample_key(sample.r_i, sample.r_j, sample.omega), sample);
    }

    pub fn extend(&mut self, samples: impl IntoIterator<Item = GreenSample>) {
        for s in samples {
            self.insert(s);
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl GreenSource for MapSource {
    fn sample(&mut self, r_i: Vec3, r_j: Vec3, omega: f64) -> Result<GreenSample, GreensError> {
        // reciprocity: a stored (j, i) sample serves (i, j) transposed
        if let Some(s) = self.samples.get(&sample_key(r_i, r_j, omega)) {
            return Ok(s.clone());
        }
        if let Some(s) = self.samples.get(&sample_key(r_j, r_i, omega)) {
            return Ok(GreenSample {
                r_i,
                r_j,
                omega,
                tensor: s.tensor.transpose(),
                provenance: s.provenance,
            });
        }
        Err(GreensError::MissingSample { r_i, r_j, omega })
    }
}
