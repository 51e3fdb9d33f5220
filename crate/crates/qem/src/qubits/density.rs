//! Density matrices with invariant validation.

use nalgebra::{DMatrix, DVector};

use crate::linalg::hermitian_eigenvalues;
use crate::Complex;

use super::QubitError;

/// Hermiticity tolerance (max-entry norm of rho - rho^H).
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Trace tolerance |Tr rho - 1|.
pub const TRACE_TOL: f64 = 1e-9;
/// Minimum-eigenvalue floor.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// N-qubit density matrix (dimension 2^N), validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex>) -> Result<Self, QubitError> {
        let dm = Self { m };
        dm.check()?;
        Ok(dm)
    }

    /// Pure state |psi><psi| from a ket (normalized internally).
    pub fn pure(ket: &DVector<Complex>) -> Result<Self, QubitError> {
        let norm = ket.norm();
        if norm == 0.0 {
            return Err(QubitError::InvalidState("zero ket".into()));
        }
        let psi = ket / Complex::from(norm);
        let dim = psi.len();
        let mut m = DMatrix::<Complex>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(Self { m })
    }

    /// Computational basis state |index> of an n-qubit register.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim);
        let mut m = DMatrix::<Complex>::zeros(dim, dim);
        m[(index, index)] = Complex::from(1.0);
        Self { m }
    }

    /// Single-qubit |+> or |-> state.
    pub fn plus_minus(minus: bool) -> Self {
        let s = if minus { -0.5 } else { 0.5 };
        let mut m = DMatrix::<Complex>::zeros(2, 2);
        m[(0, 0)] = Complex::from(0.5);
        m[(1, 1)] = Complex::from(0.5);
        m[(0, 1)] = Complex::from(s);
        m[(1, 0)] = Complex::from(s);
        Self { m }
    }

    /// Default single-qubit average set {|0>, |1>, |+>, |->}; the
    /// computational basis alone is blind to dephasing.
    pub fn single_qubit_default_set() -> Vec<Self> {
        vec![
            Self::basis_state(1, 0),
            Self::basis_state(1, 1),
            Self::plus_minus(false),
            Self::plus_minus(true),
        ]
    }

    /// Two-qubit computational basis set {|00>, |01>, |10>, |11>}.
    pub fn two_qubit_basis_set() -> Vec<Self> {
        (0..4).map(|k| Self::basis_state(2, k)).collect()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex> {
        self.m
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim()).map(|i| self.m[(i, i)]).sum()
    }

    /// Tr rho^2.
    pub fn purity(&self) -> f64 {
        crate::linalg::trace_product(&self.m, &self.m).re
    }

    /// Validate Hermiticity, unit trace, and positivity.
    pub fn check(&self) -> Result<(), QubitError> {
        let n = self.dim();
        if n == 0 || self.m.ncols() != n || !n.is_power_of_two() {
            return Err(QubitError::InvalidState(format!(
                "dimension {}x{} is not a power-of-two square",
                n,
                self.m.ncols()
            )));
        }
        let mut herm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm = herm.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        if herm > HERMITICITY_TOL {
            return Err(QubitError::InvalidState(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QubitError::InvalidState(format!("trace {tr} != 1")));
        }
        let eigs = hermitian_eigenvalues(&self.m);
        if eigs[0] < -POSITIVITY_TOL {
            return Err(QubitError::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                eigs[0]
            )));
        }
        Ok(())
    }

    /// Construct without validation (internal stepping).
    pub(super) fn from_unchecked(m: DMatrix<Complex>) -> Self {
        Self { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn basis_states_are_valid() {
        for k in 0..4 {
            let rho = DensityMatrix::basis_state(2, k);
            rho.check().unwrap();
            assert_relative_eq!(rho.purity(), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn pure_from_ket_normalizes() {
        let ket = DVector::from_vec(vec![Complex::new(3.0, 0.0), Complex::new(0.0, 4.0)]);
        let rho = DensityMatrix::pure(&ket).unwrap();
        rho.check().unwrap();
        assert_relative_eq!(rho.matrix()[(0, 0)].re, 9.0 / 25.0, max_relative = 1e-14);
        assert_relative_eq!(rho.purity(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_states() {
        let mut m = DMatrix::<Complex>::zeros(2, 2);
        m[(0, 0)] = Complex::from(2.0); // trace 2
        assert!(DensityMatrix::new(m).is_err());
        let mut m = DMatrix::<Complex>::zeros(2, 2);
        m[(0, 0)] = Complex::from(1.5);
        m[(1, 1)] = Complex::from(-0.5); // negative eigenvalue
        assert!(DensityMatrix::new(m).is_err());
        let mut m = DMatrix::<Complex>::zeros(2, 2);
        m[(0, 0)] = Complex::from(1.0);
        m[(0, 1)] = Complex::new(0.0, 1e-6); // non-Hermitian
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn plus_state_off_diagonals() {
        let rho = DensityMatrix::plus_minus(false);
        assert_relative_eq!(rho.matrix()[(0, 1)].re, 0.5, max_relative = 1e-15);
        let rho = DensityMatrix::plus_minus(true);
        assert_relative_eq!(rho.matrix()[(0, 1)].re, -0.5, max_relative = 1e-15);
    }
}
