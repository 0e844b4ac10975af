//! Cyclic complex Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies an ordinary real Jacobi rotation. At dimension ≤ 4
//! a handful of sweeps reach machine precision.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Symmetry tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (descending) and the matching orthonormal eigenvectors stored
/// as columns.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `Σ f(λ_i) v_i v_i†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrised (`(m + m†)/2`) after the symmetry check so that
/// round-off in the caller never leaks into the spectrum.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput(defect));
    }
    Ok(jacobi(m.hermitian_part()))
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eig(m).map(|e| e.values)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> HermitianEig {
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let h = a[(p, q)];
                let habs = h.norm();
                if habs <= 1e-300 {
                    continue;
                }
                // phase that makes the pivot real and positive
                let phase = h / habs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * habs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(.., e^{-iφ} at q, ..) · R(p, q)
                let eq = phase.conj();
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = eq * (-s);
                let g_qq = eq * c;

                // A <- A G (columns p, q)
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * g_pp + aiq * g_qp;
                    a[(i, q)] = aip * g_pq + aiq * g_qq;
                }
                // A <- G† A (rows p, q)
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = g_pp.conj() * apj + g_qp.conj() * aqj;
                    a[(q, j)] = g_pq.conj() * apj + g_qq.conj() * aqj;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * g_pp + viq * g_qp;
                    v[(i, q)] = vip * g_pq + viq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    HermitianEig { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::matrix::pauli;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_decomposition(m: &ComplexMatrix) {
        let e = hermitian_eig(m).unwrap();
        let n = m.dim();
        for k in 0..n {
            let vk = e.vector(k);
            for i in 0..n {
                let mv: Complex64 = (0..n).map(|j| m[(i, j)] * vk[j]).sum();
                assert!((mv - vk[i] * e.values[k]).norm() <= 1e-10 * n as f64);
            }
        }
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(e.reconstruct().max_abs_diff(m) < 1e-10);
    }

    #[test]
    fn identity_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_z_spectrum() {
        let e = hermitian_eig(&pauli(3)).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        assert!((e.vector(0)[0].norm() - 1.0).abs() < 1e-15);
        assert!((e.vector(1)[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_4x4() {
        let m = ComplexMatrix::from_fn(4, |i, j| {
            if i == j {
                c(i as f64 * 0.3 - 0.2, 0.0)
            } else if i < j {
                c(0.1 * (i + 2 * j) as f64, 0.05 * (j as f64 - i as f64))
            } else {
                c(0.1 * (j + 2 * i) as f64, -0.05 * (i as f64 - j as f64))
            }
        });
        check_decomposition(&m);
    }

    #[test]
    fn degenerate_spectrum() {
        let m = ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0, 0.0]);
        check_decomposition(&m);
        let y = pauli(2).kron(&pauli(2));
        check_decomposition(&y);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitianInput(_))));
    }
}
