use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from a flat row-major buffer of `dim²` entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|` for a (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Hilbert-Schmidt inner product `Re tr(self† other)`.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += v[i].conj() * self[(i, j)] * v[j];
            }
        }
        acc
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dims");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum on mismatched dims");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference on mismatched dims");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pauli operator `σ_i` for `i ∈ {0,1,2,3}`, with `σ_0 = I`.
pub fn pauli(i: usize) -> ComplexMatrix {
    let c = |re, im| Complex64::new(re, im);
    let data = match i {
        0 => vec![c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
        1 => vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        2 => vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        3 => vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        _ => panic!("pauli index {i} out of range"),
    };
    ComplexMatrix { dim: 2, data }
}

/// 2×2 Hermitian matrix `(c0·I + c·σ)` from its real Pauli coordinates.
pub fn qubit_operator(c0: f64, c: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = Complex64::new(c0 + c[2], 0.0);
    m[(1, 1)] = Complex64::new(c0 - c[2], 0.0);
    m[(0, 1)] = Complex64::new(c[0], -c[1]);
    m[(1, 0)] = Complex64::new(c[0], c[1]);
    m
}

/// Real coordinates `(tr m, tr mσx, tr mσy, tr mσz)` of a 2×2 matrix
/// (real parts only, which is exact for Hermitian input).
pub fn qubit_coords(m: &ComplexMatrix) -> [f64; 4] {
    debug_assert_eq!(m.dim(), 2);
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    [
        (a + d).re,
        (b + c).re,
        // tr(m σy) = i(m01 - m10)
        (Complex64::new(0.0, 1.0) * (b - c)).re,
        (a - d).re,
    ]
}

/// Largest eigenvalue of a 2×2 Hermitian matrix in closed form:
/// `λmax(c0·I + c·σ) = c0 + |c|`.
pub fn qubit_lambda_max(m: &ComplexMatrix) -> f64 {
    let [t, x, y, z] = qubit_coords(m);
    0.5 * t + 0.5 * (x * x + y * y + z * z).sqrt()
}

/// Smallest eigenvalue of a 2×2 Hermitian matrix in closed form.
pub fn qubit_lambda_min(m: &ComplexMatrix) -> f64 {
    let [t, x, y, z] = qubit_coords(m);
    0.5 * t - 0.5 * (x * x + y * y + z * z).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let x = pauli(1);
        let y = pauli(2);
        let z = pauli(3);
        let xy = &x * &y;
        let iz = z.scale_complex(Complex64::new(0.0, 1.0));
        assert!(xy.max_abs_diff(&iz) < 1e-15);
        for i in 0..4 {
            let s = pauli(i);
            assert!((&s * &s).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn qubit_coords_round_trip() {
        let m = qubit_operator(0.3, [0.1, -0.4, 0.25]);
        let c = qubit_coords(&m);
        // coords are traces against Paulis, so (c0, c) scale by 2
        assert!((c[0] - 0.6).abs() < 1e-15);
        assert!((c[1] - 0.2).abs() < 1e-15);
        assert!((c[2] + 0.8).abs() < 1e-15);
        assert!((c[3] - 0.5).abs() < 1e-15);
        let lmax = qubit_lambda_max(&m);
        let expect = 0.3 + (0.01f64 + 0.16 + 0.0625).sqrt();
        assert!((lmax - expect).abs() < 1e-15);
    }

    #[test]
    fn from_vec_rejects_bad_length() {
        assert!(matches!(
            ComplexMatrix::from_vec(2, vec![ZERO; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
