//! Pure-dephasing rates from low-frequency Green-tensor spectra.
//!
//! `gamma_phi^{ij}(t) = (4 mu0 / hbar pi) int_0^{w_c} dw sin(w t)/w S_ij(w)`
//! with `S_ij(w) = (Nbar(w) + 1/2) (w^2/c^2) m_i . Im G_m(r_i, r_j, w) . m_j`.
//!
//! The sampled scalar `S_ij` is interpolated segmentwise as a log-log power
//! law (linear fallback when signs change), extrapolated below the lowest
//! sample, and integrated with subdivision at the zeros of `sin(w t)`.

use nalgebra::DMatrix;

use crate::bath::BathSpec;
use crate::constants::SI;
use crate::quad::{adaptive_gk, AdaptiveOptions};
use crate::{Mat3, Vec3};

use super::qubit::QubitSpec;
use super::QubitError;

/// Im G_m samples over a frequency grid for every qubit pair.
#[derive(Debug, Clone)]
pub struct DephasingSpectrum {
    /// Ascending positive frequencies, rad/s; the last must reach the
    /// bath's dephasing cutoff.
    pub omegas: Vec<f64>,
    /// `im_g[k][i * n + j]` = Im G_m(r_i, r_j, omegas[k]).
    pub im_g: Vec<Vec<Mat3>>,
}

impl DephasingSpectrum {
    /// Default sampling grid: `points_per_decade` log-spaced points over
    /// `[cutoff / 10^decades, cutoff]`.
    pub fn log_grid(cutoff: f64, points_per_decade: usize, decades: usize) -> Vec<f64> {
        let total = points_per_decade * decades;
        (0..=total)
            .map(|k| cutoff * 10f64.powf(k as f64 / points_per_decade as f64 - decades as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum Interp {
    /// s(w) = s0 (w / w0)^p
    PowerLaw { p: f64 },
    /// s(w) = s0 + slope (w - w0)
    Linear { slope: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    w0: f64,
    w1: f64,
    s0: f64,
    interp: Interp,
}

impl Segment {
    fn eval(&self, w: f64) -> f64 {
        match self.interp {
            Interp::PowerLaw { p } => self.s0 * (w / self.w0).powf(p),
            Interp::Linear { slope } => self.s0 + slope * (w - self.w0),
        }
    }
}

/// Time-dependent dephasing-rate matrix builder.
#[derive(Debug, Clone)]
pub struct DephasingModel {
    n: usize,
    cutoff: f64,
    /// Segments per ordered pair (i, j), i <= j; gamma is symmetric.
    segments: Vec<Vec<Segment>>,
    prefactor: f64,
}

impl DephasingModel {
    /// Build the model from sampled Im G. The grid must cover
    /// `(0, bath.dephasing_cutoff]` with its last point at or above the
    /// cutoff; at least 4 points per decade is recommended.
    pub fn build(
        qubits: &[QubitSpec],
        spectrum: &DephasingSpectrum,
        bath: &BathSpec,
    ) -> Result<Self, QubitError> {
        let n = qubits.len();
        let omegas = &spectrum.omegas;
        if omegas.len() < 2 || omegas[0] <= 0.0 || omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QubitError::BadSpectrumGrid);
        }
        if spectrum.im_g.len() != omegas.len()
            || spectrum.im_g.iter().any(|v| v.len() != n * n)
        {
            return Err(QubitError::DimensionMismatch(format!(
                "spectrum holds {} grids of {} tensors; want {} grids of {}",
                spectrum.im_g.len(),
                spectrum.im_g.first().map(|v| v.len()).unwrap_or(0),
                omegas.len(),
                n * n
            )));
        }
        let cutoff = bath.dephasing_cutoff;
        if *omegas.last().unwrap() < cutoff * (1.0 - 1e-12) {
            return Err(QubitError::SpectrumTooShort {
                cutoff,
                grid_end: *omegas.last().unwrap(),
            });
        }

        let moments: Vec<Vec3> = qubits.iter().map(|q| q.m_parallel()).collect();
        let mut per_pair = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if j < i {
                    per_pair.push(Vec::new());
                    continue;
                }
                // sampled scalar S_ij(w_k)
                let mut s = Vec::with_capacity(omegas.len());
                for (k, &w) in omegas.iter().enumerate() {
                    let nbar = bath.mean_photon_number(w)?;
                    let g = &spectrum.im_g[k][i * n + j];
                    let proj = (moments[i].transpose() * g * moments[j])[(0, 0)];
                    s.push((nbar + 0.5) * (w * w) / (SI.c * SI.c) * proj);
                }
                let mut segs = Vec::new();
                // extrapolation below the first sample
                let first = fit_segment(omegas[0], omegas[1], s[0], s[1]);
                if s[0] != 0.0 {
                    let p = match first.interp {
                        Interp::PowerLaw { p } => p,
                        // linear fallback toward zero frequency: treat as flat
                        Interp::Linear { .. } => 0.0,
                    };
                    if p <= -0.999 {
                        return Err(QubitError::NonIntegrableSpectrum(p));
                    }
                    segs.push(Segment {
                        w0: omegas[0],
                        w1: omegas[0],
                        s0: s[0],
                        interp: Interp::PowerLaw { p },
                    });
                    // marker segment: (0, w0] handled specially via w1 == w0
                }
                for k in 0..omegas.len() - 1 {
                    if omegas[k] >= cutoff {
                        break;
                    }
                    let w1 = omegas[k + 1].min(cutoff);
                    let mut seg = fit_segment(omegas[k], omegas[k + 1], s[k], s[k + 1]);
                    seg.w1 = w1;
                    segs.push(seg);
                }
                per_pair.push(segs);
            }
        }
        Ok(Self { n, cutoff, segments: per_pair, prefactor: 4.0 * SI.mu0 / (SI.hbar * std::f64::consts::PI) })
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Dephasing-rate matrix `gamma_phi(t)`, 1/s. Exactly zero at t = 0.
    pub fn rates_at(&self, t: f64) -> Result<DMatrix<f64>, QubitError> {
        let mut out = DMatrix::<f64>::zeros(self.n, self.n);
        if t == 0.0 {
            return Ok(out);
        }
        for i in 0..self.n {
            for j in i..self.n {
                let mut total = 0.0;
                for seg in &self.segments[i * self.n + j] {
                    total += if seg.w1 == seg.w0 {
                        // low-frequency extrapolation tail (0, w0]
                        integrate_tail(seg, t)?
                    } else {
                        integrate_segment(seg, t)?
                    };
                }
                let g = self.prefactor * total;
                out[(i, j)] = g;
                out[(j, i)] = g;
            }
        }
        Ok(out)
    }
}

fn fit_segment(w0: f64, w1: f64, s0: f64, s1: f64) -> Segment {
    let interp = if s0 != 0.0 && s1 != 0.0 && (s0 > 0.0) == (s1 > 0.0) {
        Interp::PowerLaw { p: (s1 / s0).ln() / (w1 / w0).ln() }
    } else {
        Interp::Linear { slope: (s1 - s0) / (w1 - w0) }
    };
    Segment { w0, w1, s0, interp }
}

/// Integrate `s(w) sin(w t) / w` over `[seg.w0, seg.w1]` with subdivision at
/// the zeros of the sine.
fn integrate_segment(seg: &Segment, t: f64) -> Result<f64, QubitError> {
    let opts = AdaptiveOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 200 };
    let mut boundaries = vec![seg.w0];
    let half_period = std::f64::consts::PI / t;
    let mut k = (seg.w0 / half_period).floor() + 1.0;
    while k * half_period < seg.w1 {
        if k * half_period > seg.w0 {
            boundaries.push(k * half_period);
        }
        k += 1.0;
    }
    boundaries.push(seg.w1);
    let mut total = 0.0;
    for pair in boundaries.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (v, _) = adaptive_gk(|w| seg.eval(w) * (w * t).sin() / w, a, b, &opts)?;
        total += v;
    }
    Ok(total)
}

/// Integrate the extrapolated power-law tail over `(0, w0]`.
fn integrate_tail(seg: &Segment, t: f64) -> Result<f64, QubitError> {
    let p = match seg.interp {
        Interp::PowerLaw { p } => p,
        Interp::Linear { .. } => 0.0,
    };
    let opts = AdaptiveOptions { rel_tol: 1e-10, abs_tol: 0.0, max_intervals: 400 };
    let w0 = seg.w0;
    let tail = Segment { w0, w1: w0, s0: seg.s0, interp: Interp::PowerLaw { p } };
    // integrand ~ t s0 (w/w0)^p as w -> 0: integrable for p > -1
    let mut boundaries = vec![0.0f64];
    let half_period = std::f64::consts::PI / t;
    let mut k = 1.0;
    while k * half_period < w0 {
        boundaries.push(k * half_period);
        k += 1.0;
    }
    boundaries.push(w0);
    let mut total = 0.0;
    for pair in boundaries.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (v, _) = adaptive_gk(
            |w| {
                if w == 0.0 {
                    0.0
                } else {
                    tail.eval(w) * (w * t).sin() / w
                }
            },
            a,
            b,
            &opts,
        )?;
        total += v;
    }
    Ok(total)
}
