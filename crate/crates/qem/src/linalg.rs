//! Small dense linear-algebra helpers for Hermitian checks and qubit-space
//! operators. The big VIE systems go through `faer`; these routines only see
//! 3x3 Green tensors, NxN rate matrices, and 2^N-dimensional density
//! matrices.

use nalgebra::DMatrix;

use crate::{CMat3, Complex};

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Input is symmetrized as `(A + A^H)/2`; the anti-Hermitian residue is the
/// caller's business. Suitable for small matrices (checks on rate matrices
/// and density matrices).
pub fn hermitian_eigenvalues(a: &DMatrix<Complex>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let mut m = DMatrix::<Complex>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * Complex::from(0.5);
        }
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return vec![0.0; n];
    }
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let b = apq.norm();
                if b <= tol * 1e-2 {
                    continue;
                }
                let phase = apq / Complex::from(b);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = 0.5 * (2.0 * b).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // U = [[c, -s e^{i phi}], [s e^{-i phi}, c]] applied on both sides
                let cp = Complex::from(c);
                let se_p = phase * Complex::from(s);
                let se_m = phase.conj() * Complex::from(s);
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * cp + mkq * se_m;
                    m[(k, q)] = mkq * cp - mkp * se_p;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * cp + mqk * se_p;
                    m[(q, k)] = mqk * cp - mpk * se_m;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Eigenvalues of the Hermitian part of a 3x3 complex tensor.
pub fn hermitian_eigenvalues_3x3(t: &CMat3) -> [f64; 3] {
    let mut a = DMatrix::<Complex>::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            a[(i, j)] = t[(i, j)];
        }
    }
    let e = hermitian_eigenvalues(&a);
    [e[0], e[1], e[2]]
}

/// Positive-semidefiniteness check with a relative floor: smallest eigenvalue
/// of the Hermitian part must be >= -tol_rel * largest magnitude eigenvalue.
pub fn is_psd(a: &DMatrix<Complex>, tol_rel: f64) -> bool {
    let eigs = hermitian_eigenvalues(a);
    let max = eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    if max == 0.0 {
        return true;
    }
    eigs.iter().all(|&e| e >= -tol_rel * max)
}

/// Kronecker product of two complex matrices.
pub fn kron(a: &DMatrix<Complex>, b: &DMatrix<Complex>) -> DMatrix<Complex> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::<Complex>::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Frobenius inner-product trace `Tr[a b]`.
pub fn trace_product(a: &DMatrix<Complex>, b: &DMatrix<Complex>) -> Complex {
    let n = a.nrows();
    let mut t = Complex::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}
