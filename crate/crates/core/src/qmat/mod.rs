//! Dense complex linear algebra for qubit and two-qubit operators.
//!
//! Two-qubit matrices use the basis order `|00⟩, |01⟩, |10⟩, |11⟩` with
//! Alice's qubit first.

mod density;
mod eig;
mod matrix;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{
    parse_density_json, read_density_json, validate, DensityMatrix, DensityMatrixJson,
    DEFAULT_TOLERANCE,
};
pub use eig::{hermitian_eig, hermitian_eigenvalues, HermitianEig, HERMITIAN_TOL};
pub use matrix::{
    pauli, qubit_coords, qubit_lambda_max, qubit_lambda_min, qubit_operator, ComplexMatrix,
};

use crate::Result;

/// One party of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Kronecker product.
pub fn tensor(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x.kron(y)
}

/// Traces out `side` of a 4×4 operator without any state validation.
pub fn partial_trace_matrix(m: &ComplexMatrix, side: Side) -> Result<ComplexMatrix> {
    m.check_dim(4)?;
    let idx = |a: usize, b: usize| 2 * a + b;
    Ok(ComplexMatrix::from_fn(2, |r, c| match side {
        Side::A => m[(idx(0, r), idx(0, c))] + m[(idx(1, r), idx(1, c))],
        Side::B => m[(idx(r, 0), idx(c, 0))] + m[(idx(r, 1), idx(c, 1))],
    }))
}

/// Reduced state after tracing out `side`.
pub fn partial_trace(rho: &DensityMatrix, side: Side) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(rho.matrix(), side)?;
    DensityMatrix::with_tolerance(reduced, rho.tolerance())
}

/// Partial transpose on `side`.
pub fn partial_transpose(m: &ComplexMatrix, side: Side) -> Result<ComplexMatrix> {
    m.check_dim(4)?;
    Ok(ComplexMatrix::from_fn(4, |i, j| {
        let (a, b) = (i / 2, i % 2);
        let (a2, b2) = (j / 2, j % 2);
        match side {
            Side::A => m[(2 * a2 + b, 2 * a + b2)],
            Side::B => m[(2 * a + b2, 2 * a2 + b)],
        }
    }))
}

/// Conjugation by SWAP: exchanges the roles of Alice and Bob.
pub fn swap_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.check_dim(4)?;
    let sw = |i: usize| 2 * (i % 2) + i / 2;
    Ok(ComplexMatrix::from_fn(4, |i, j| m[(sw(i), sw(j))]))
}

pub fn swap_parties(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let m = swap_matrix(rho.matrix())?;
    DensityMatrix::with_tolerance(m, rho.tolerance())
}

/// PSD square root with negative eigenvalues clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.map(|x| x.max(0.0).sqrt()))
}

/// Uhlmann fidelity `[tr √(√ρ σ √ρ)]²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.matrix().check_dim(sigma.dim())?;
    let s = psd_sqrt(rho.matrix())?;
    let inner = &(&s * sigma.matrix()) * &s;
    let root_trace: f64 = hermitian_eig(&inner.hermitian_part())?
        .values
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Real Bloch parameters of a two-qubit operator:
/// `ρ = ¼(I⊗I + a·σ⊗I + I⊗b·σ + Σ T_ij σ_i⊗σ_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochRep {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

fn trace_against(m: &ComplexMatrix, op: &ComplexMatrix) -> f64 {
    // tr(m op) for Hermitian op
    let n = m.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += m[(i, j)] * op[(j, i)];
        }
    }
    acc.re
}

pub fn bloch_decompose_matrix(m: &ComplexMatrix) -> Result<BlochRep> {
    m.check_dim(4)?;
    let id = pauli(0);
    let mut rep = BlochRep {
        a: [0.0; 3],
        b: [0.0; 3],
        t: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        rep.a[i] = trace_against(m, &pauli(i + 1).kron(&id));
        rep.b[i] = trace_against(m, &id.kron(&pauli(i + 1)));
        for j in 0..3 {
            rep.t[i][j] = trace_against(m, &pauli(i + 1).kron(&pauli(j + 1)));
        }
    }
    Ok(rep)
}

pub fn bloch_decompose(rho: &DensityMatrix) -> Result<BlochRep> {
    bloch_decompose_matrix(rho.matrix())
}

pub fn bloch_assemble(rep: &BlochRep) -> ComplexMatrix {
    let id = pauli(0);
    let mut m = id.kron(&id);
    for i in 0..3 {
        m = &m + &pauli(i + 1).kron(&id).scale(rep.a[i]);
        m = &m + &id.kron(&pauli(i + 1)).scale(rep.b[i]);
        for j in 0..3 {
            m = &m + &pauli(i + 1).kron(&pauli(j + 1)).scale(rep.t[i][j]);
        }
    }
    m.scale(0.25)
}

/// `|Ψ+⟩ = (|01⟩ + |10⟩)/√2`.
pub fn psi_plus() -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(0.0, 0.0),
    ]
}

pub fn psi_plus_projector() -> ComplexMatrix {
    ComplexMatrix::outer(&psi_plus())
}
