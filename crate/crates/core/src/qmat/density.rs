use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::{hermitian_eig, HermitianEig};
use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Default validation slack for density matrices.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A Hermitian, positive-semidefinite, unit-trace matrix of dimension 2 or 4.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    tolerance: f64,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(mat, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(mat: ComplexMatrix, tolerance: f64) -> Result<Self> {
        validate(&mat, tolerance)?;
        Ok(Self { mat, tolerance })
    }

    /// Wraps a matrix without validating it. Only the dimension is checked.
    pub fn new_unchecked(mat: ComplexMatrix) -> Result<Self> {
        check_supported_dim(mat.dim())?;
        Ok(Self {
            mat,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn eig(&self) -> HermitianEig {
        hermitian_eig(&self.mat).expect("density matrix is Hermitian")
    }

    pub fn to_json(&self) -> DensityMatrixJson {
        DensityMatrixJson::from_matrix(&self.mat)
    }
}

fn check_supported_dim(dim: usize) -> Result<()> {
    if dim != 2 && dim != 4 {
        return Err(Error::InvalidState(format!(
            "dimension {dim} not supported (2 or 4)"
        )));
    }
    Ok(())
}

/// Checks the three density-matrix invariants at the given slack.
pub fn validate(mat: &ComplexMatrix, tol: f64) -> Result<()> {
    check_supported_dim(mat.dim())?;
    let defect = mat.hermiticity_defect();
    if defect > tol {
        return Err(Error::NonHermitianInput(defect));
    }
    let tr = mat.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidState(format!("trace {tr} is not 1")));
    }
    let min = hermitian_eig(mat)?.min();
    if min < -tol {
        return Err(Error::InvalidState(format!(
            "minimum eigenvalue {min:e} is negative"
        )));
    }
    Ok(())
}

/// On-disk form: `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityMatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DensityMatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        Self {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Parse(format!(
                "density matrix JSON: \"re\" and \"im\" must both be {n}x{n}"
            )));
        }
        Ok(ComplexMatrix::from_fn(n, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }

    /// Parses and, when `validate` is set, checks the state invariants.
    pub fn into_state(self, validate: bool) -> Result<DensityMatrix> {
        let m = self.to_matrix()?;
        if validate {
            DensityMatrix::new(m)
        } else {
            DensityMatrix::new_unchecked(m)
        }
    }
}

pub fn parse_density_json(text: &str, validate: bool) -> Result<DensityMatrix> {
    let raw: DensityMatrixJson = serde_json::from_str(text)?;
    raw.into_state(validate)
}

pub fn read_density_json(path: impl AsRef<Path>, validate: bool) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_density_json(&text, validate)
}
