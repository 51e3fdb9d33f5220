//! Lindblad generator for collective relaxation and pure dephasing.
//!
//! Relaxation (downward and thermal upward branches):
//!
//! ```text
//! L_r[rho] = (Nbar+1) sum_ij Gamma_ij [ s_i^- rho s_j^+ - 1/2 {s_j^+ s_i^-, rho} ]
//!          +  Nbar    sum_ij Gamma_ij [ s_i^+ rho s_j^- - 1/2 {s_j^- s_i^+, rho} ]
//! ```
//!
//! The anticommutator pairs `s_j^+ s_i^-` with the jump `s_i^- rho s_j^+`
//! (GKSL ordering), which preserves the trace for any Hermitian Gamma;
//! for real symmetric rate matrices it coincides with the more common
//! index ordering. Dephasing:
//!
//! ```text
//! L_phi[rho](t) = sum_ij gamma_ij(t) [ s_i^z rho s_j^z - 1/2 {s_i^z s_j^z, rho} ]
//! ```

use nalgebra::DMatrix;

use crate::linalg::kron;
use crate::Complex;

use super::dephasing::DephasingModel;
use super::rates::RateSet;
use super::QubitError;

/// Precomputed superoperator data for `d rho/dt` evaluation.
pub struct LindbladGenerator {
    n: usize,
    dim: usize,
    nbar: f64,
    gamma: DMatrix<Complex>,
    dephasing: Option<DephasingModel>,
    sm: Vec<DMatrix<Complex>>,
    sp: Vec<DMatrix<Complex>>,
    sz: Vec<DMatrix<Complex>>,
    /// prod_pm[i * n + j] = s_j^+ s_i^-
    prod_pm: Vec<DMatrix<Complex>>,
    /// prod_mp[i * n + j] = s_j^- s_i^+
    prod_mp: Vec<DMatrix<Complex>>,
    /// prod_zz[i * n + j] = s_i^z s_j^z
    prod_zz: Vec<DMatrix<Complex>>,
}

/// Embed a single-qubit operator at site `site` of an `n`-qubit register.
fn embed(op: &DMatrix<Complex>, site: usize, n: usize) -> DMatrix<Complex> {
    let mut out = DMatrix::<Complex>::identity(1, 1);
    for k in 0..n {
        let factor = if k == site {
            op.clone()
        } else {
            DMatrix::<Complex>::identity(2, 2)
        };
        out = kron(&out, &factor);
    }
    out
}

fn sigma_minus() -> DMatrix<Complex> {
    let mut m = DMatrix::<Complex>::zeros(2, 2);
    m[(0, 1)] = Complex::from(1.0); // |0><1|
    m
}

fn sigma_z() -> DMatrix<Complex> {
    let mut m = DMatrix::<Complex>::zeros(2, 2);
    m[(0, 0)] = Complex::from(-1.0);
    m[(1, 1)] = Complex::from(1.0); // |1><1| - |0><0|
    m
}

/// Build the Lindblad generator from a rate set. The relaxation matrix must
/// be Hermitian.
pub fn build_lindblad(rates: &RateSet) -> Result<LindbladGenerator, QubitError> {
    let n = rates.gamma_r.nrows();
    if rates.gamma_r.ncols() != n {
        return Err(QubitError::DimensionMismatch(format!(
            "rate matrix is {}x{}",
            n,
            rates.gamma_r.ncols()
        )));
    }
    let scale = rates.gamma_r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let defect = rates.hermiticity_defect();
    if defect > 1e-10 * scale.max(1e-300) {
        return Err(QubitError::NonHermitianRates(defect));
    }
    if let Some(d) = &rates.dephasing {
        if d.qubit_count() != n {
            return Err(QubitError::DimensionMismatch(format!(
                "dephasing model holds {} qubits, rates hold {}",
                d.qubit_count(),
                n
            )));
        }
    }
    let dim = 1usize << n;
    let sm: Vec<_> = (0..n).map(|i| embed(&sigma_minus(), i, n)).collect();
    let sp: Vec<_> = sm.iter().map(|m| m.adjoint()).collect();
    let sz: Vec<_> = (0..n).map(|i| embed(&sigma_z(), i, n)).collect();
    let mut prod_pm = Vec::with_capacity(n * n);
    let mut prod_mp = Vec::with_capacity(n * n);
    let mut prod_zz = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            prod_pm.push(&sp[j] * &sm[i]);
            prod_mp.push(&sm[j] * &sp[i]);
            prod_zz.push(&sz[i] * &sz[j]);
        }
    }
    Ok(LindbladGenerator {
        n,
        dim,
        nbar: rates.nbar,
        gamma: rates.gamma_r.clone(),
        dephasing: rates.dephasing.clone(),
        sm,
        sp,
        sz,
        prod_pm,
        prod_mp,
        prod_zz,
    })
}

impl LindbladGenerator {
    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L_r[rho] + L_phi(t)[rho]`.
    pub fn apply(&self, rho: &DMatrix<Complex>, t: f64) -> Result<DMatrix<Complex>, QubitError> {
        let mut out = DMatrix::<Complex>::zeros(self.dim, self.dim);
        let half = Complex::from(0.5);
        let down = Complex::from(self.nbar + 1.0);
        let up = Complex::from(self.nbar);
        for i in 0..self.n {
            for j in 0..self.n {
                let g = self.gamma[(i, j)];
                if g.norm() == 0.0 {
                    continue;
                }
                // downward: jump s_i^- rho s_j^+, anticommutator s_j^+ s_i^-
                let jump = &self.sm[i] * rho * &self.sp[j];
                let anti = &self.prod_pm[i * self.n + j];
                out += (jump - (anti * rho + rho * anti) * half) * (g * down);
                // upward (thermal): jump s_i^+ rho s_j^-
                if self.nbar > 0.0 {
                    let jump = &self.sp[i] * rho * &self.sm[j];
                    let anti = &self.prod_mp[i * self.n + j];
                    out += (jump - (anti * rho + rho * anti) * half) * (g * up);
                }
            }
        }
        if let Some(model) = &self.dephasing {
            let gphi = model.rates_at(t)?;
            for i in 0..self.n {
                for j in 0..self.n {
                    let g = Complex::from(gphi[(i, j)]);
                    if g.norm() == 0.0 {
                        continue;
                    }
                    let jump = &self.sz[i] * rho * &self.sz[j];
                    let anti = &self.prod_zz[i * self.n + j];
                    out += (jump - (anti * rho + rho * anti) * half) * g;
                }
            }
        }
        Ok(out)
    }
}
