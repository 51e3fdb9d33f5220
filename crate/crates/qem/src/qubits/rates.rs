//! Relaxation rates from magnetic Green tensors, and the T1 conversion.

use nalgebra::DMatrix;

use crate::bath::BathSpec;
use crate::constants::SI;
use crate::greens::GreenSource;
use crate::{Complex, Mat3};

use super::dephasing::DephasingModel;
use super::qubit::QubitSpec;
use super::QubitError;

/// Relaxation and dephasing rates of an N-qubit system.
#[derive(Debug, Clone)]
pub struct RateSet {
    /// Hermitian relaxation-rate matrix Gamma_r, 1/s.
    pub gamma_r: DMatrix<Complex>,
    /// Pure-dephasing model gamma_phi(t), if built.
    pub dephasing: Option<DephasingModel>,
    /// Mean photon number at the qubits' mean splitting frequency.
    pub nbar: f64,
}

impl RateSet {
    /// Max deviation from Hermiticity of the relaxation matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.gamma_r.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.gamma_r[(i, j)] - self.gamma_r[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// Bilinear form `a . M . b` with a real 3x3 matrix and complex 3-vectors
/// (no conjugation; the formulas pair m^eg with m^ge explicitly).
fn bilinear(a: &crate::CVec3, m: &Mat3, b: &crate::CVec3) -> Complex {
    let mut acc = Complex::from(0.0);
    for r in 0..3 {
        for c in 0..3 {
            acc += a[r] * Complex::from(m[(r, c)]) * b[c];
        }
    }
    acc
}

/// Single and correlated relaxation rates:
///
/// `Gamma_ij = (2 mu0 k0^2 / hbar) m_i^eg . Im G_m(r_i, r_j, w_+) . m_j^ge`
///
/// with `w_+ = (w_i + w_j)/2` and `k0` evaluated at the same frequency.
/// Off-diagonal pairs with strongly unequal frequencies fall outside the
/// derivation's regime; they produce a warning with the detuning ratio.
pub fn relaxation_rates(
    qubits: &[QubitSpec],
    source: &mut dyn GreenSource,
    bath: &BathSpec,
) -> Result<RateSet, QubitError> {
    let n = qubits.len();
    let mut gamma = DMatrix::<Complex>::zeros(n, n);
    // group evaluations by frequency so scene-backed sources reuse
    // factorizations: diagonal terms first (w_i), then pairs (w_+)
    let mut requests: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        requests.push((i, i, qubits[i].frequency));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let w_plus = 0.5 * (qubits[i].frequency + qubits[j].frequency);
            let detuning = (qubits[i].frequency - qubits[j].frequency).abs();
            if detuning > 0.1 * (qubits[i].frequency + qubits[j].frequency) {
                log::warn!(
                    "correlated relaxation between qubits {i} and {j}: |w_i - w_j| / (w_i + w_j) = {:.3} strains the near-degenerate assumption",
                    detuning / (qubits[i].frequency + qubits[j].frequency)
                );
            }
            requests.push((i, j, w_plus));
        }
    }
    requests.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));

    for (i, j, omega) in requests {
        let sample = source.sample(qubits[i].position, qubits[j].position, omega)?;
        let k0 = SI.wavenumber(omega);
        let pref = 2.0 * SI.mu0 * k0 * k0 / SI.hbar;
        let value = bilinear(&qubits[i].m_eg(), &sample.im(), &qubits[j].m_ge())
            * Complex::from(pref);
        gamma[(i, j)] = value;
        if i != j {
            gamma[(j, i)] = value.conj();
        }
    }

    let mean_omega = qubits.iter().map(|q| q.frequency).sum::<f64>() / n.max(1) as f64;
    let nbar = bath.mean_photon_number(mean_omega)?;
    Ok(RateSet { gamma_r: gamma, dephasing: None, nbar })
}

/// NV-style relaxation-time conversion `T1 = [3 (2 Nbar + 1) Gamma_ii]^-1`.
pub fn t1_from_rate(gamma_ii: f64, nbar: f64) -> Result<f64, QubitError> {
    if gamma_ii <= 0.0 {
        return Err(QubitError::NonPositiveRate(gamma_ii));
    }
    Ok(1.0 / (3.0 * (2.0 * nbar + 1.0) * gamma_ii))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freespace::free_space_gm_im;
    use crate::greens::{GreenSample, GreensError, Provenance};
    use crate::{CMat3, Vec3};
    use approx::assert_relative_eq;

    /// Free-space Im G source (coincident-point closed form, spatially
    /// constant tensor) for rate arithmetic checks.
    struct FreeSpaceIm;

    impl GreenSource for FreeSpaceIm {
        fn sample(&mut self, r_i: Vec3, r_j: Vec3, omega: f64) -> Result<GreenSample, GreensError> {
            let im = free_space_gm_im(omega);
            let tensor = CMat3::from_fn(|r, c| Complex::new(0.0, im[(r, c)]));
            Ok(GreenSample { r_i, r_j, omega, tensor, provenance: Provenance::FreeSpace })
        }
    }

    #[test]
    fn zero_moments_give_zero_rates() {
        let omega = 2.0 * std::f64::consts::PI * 2.87e9;
        let q = QubitSpec::new(Vec3::zeros(), omega, Vec3::new(0.0, 0.0, 1.0), 0.0, 0.0).unwrap();
        let rates =
            relaxation_rates(&[q], &mut FreeSpaceIm, &BathSpec::zero_temperature()).unwrap();
        assert_eq!(rates.gamma_r[(0, 0)], Complex::from(0.0));
    }

    #[test]
    fn free_space_rate_matches_closed_form() {
        // Gamma = (2 mu0 k0^2/hbar) muB^2 (w / 6 pi c) = mu0 w^3 muB^2/(3 pi hbar c^3)
        let omega = 2.0 * std::f64::consts::PI * 2.87e9;
        let q = QubitSpec::electron(Vec3::zeros(), omega, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let rates =
            relaxation_rates(&[q], &mut FreeSpaceIm, &BathSpec::zero_temperature()).unwrap();
        let got = rates.gamma_r[(0, 0)].re;
        let expected =
            SI.mu0 * omega.powi(3) * SI.mu_bohr.powi(2) / (3.0 * std::f64::consts::PI * SI.hbar * SI.c.powi(3));
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert_relative_eq!(got, 2.37e-14, max_relative = 0.02);
        assert_relative_eq!(rates.gamma_r[(0, 0)].im, 0.0, epsilon = 1e-30);
    }

    #[test]
    fn coincident_pair_reproduces_single_rate() {
        // i = j limit of the two-point formula: same code path, w_+ = w_i
        let omega = 2.0 * std::f64::consts::PI * 18e9;
        let q1 = QubitSpec::electron(Vec3::zeros(), omega, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let q2 = QubitSpec::electron(Vec3::zeros(), omega, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let rates =
            relaxation_rates(&[q1, q2], &mut FreeSpaceIm, &BathSpec::zero_temperature()).unwrap();
        let g = &rates.gamma_r;
        assert_relative_eq!(g[(0, 1)].re, g[(0, 0)].re, max_relative = 1e-12);
        assert_relative_eq!(g[(1, 0)].re, g[(0, 0)].re, max_relative = 1e-12);
        assert!(rates.hermiticity_defect() < 1e-12 * g[(0, 0)].norm());
    }

    #[test]
    fn t1_conversion() {
        assert_relative_eq!(t1_from_rate(1.0, 0.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(t1_from_rate(1.0, 0.5).unwrap(), 1.0 / 6.0, max_relative = 1e-15);
        let t_a = t1_from_rate(2.0, 0.3).unwrap();
        let t_b = t1_from_rate(4.0, 0.3).unwrap();
        assert_relative_eq!(t_a, 2.0 * t_b, max_relative = 1e-15);
        assert!(t1_from_rate(0.0, 0.0).is_err());
        assert!(t1_from_rate(-1.0, 0.0).is_err());
    }
}
