use serde::{Deserialize, Serialize};

use super::assemblage::{pairing, Assemblage};
use super::lhs::{lhs_feasible_with, price_all, FarkasDual, LhsOutcome, LpSettings};
use crate::qmat::{hermitian_eigenvalues, qubit_coords, qubit_operator, ComplexMatrix};
use crate::{Error, Result};

/// Smallest margin accepted for a certificate.
pub const MIN_MARGIN: f64 = 1e-9;

/// A linear steering functional `Σ_{a,k} tr(F_{a|k} σ_{a|k}) ≤ lhs_bound`
/// violated by a specific assemblage.
///
/// Functionals are stored as Pauli coordinates `[c₀, c_x, c_y, c_z]` of
/// `F = c₀ I + c·σ`, indexed `[setting][outcome]` with outcome 0 = `+`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringCertificate {
    pub functionals: Vec<[[f64; 4]; 2]>,
    pub lhs_bound: f64,
    pub violation: f64,
    pub margin: f64,
}

impl SteeringCertificate {
    pub fn n_settings(&self) -> usize {
        self.functionals.len()
    }

    pub fn operator(&self, k: usize, outcome: usize) -> ComplexMatrix {
        let c = self.functionals[k][outcome];
        qubit_operator(c[0], [c[1], c[2], c[3]])
    }

    /// Recomputes bound, violation and margin against `asm` by brute force:
    /// explicit operator sums over all `2^N` strategies, each diagonalised
    /// numerically. Returns the recomputed `(lhs_bound, violation, margin)`.
    pub fn recompute(&self, asm: &Assemblage) -> Result<(f64, f64, f64)> {
        let n = self.n_settings();
        if n != asm.n_settings() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: asm.n_settings(),
            });
        }
        let ops: Vec<[ComplexMatrix; 2]> =
            (0..n).map(|k| [self.operator(k, 0), self.operator(k, 1)]).collect();
        let mut bound = f64::NEG_INFINITY;
        for lam in 0u32..(1u32 << n) {
            let mut sum = ComplexMatrix::zeros(2);
            for (k, pair) in ops.iter().enumerate() {
                let idx = if lam >> k & 1 == 1 { 0 } else { 1 };
                sum = &sum + &pair[idx];
            }
            bound = bound.max(hermitian_eigenvalues(&sum)?[0]);
        }
        let violation: f64 = ops
            .iter()
            .zip(asm.blocks())
            .map(|(f, s)| pairing(&f[0], &s[0]) + pairing(&f[1], &s[1]))
            .sum();
        // any LHS assemblage satisfies violation ≤ bound · tr(total)
        let scale = asm.total().trace().re;
        Ok((bound, violation, violation - bound * scale))
    }

    /// `true` when an independent recomputation confirms `margin ≥ 1e-9`.
    pub fn verify(&self, asm: &Assemblage) -> bool {
        matches!(self.recompute(asm), Ok((_, _, m)) if m >= MIN_MARGIN)
    }
}

/// Turns a Farkas dual into a functional and evaluates it exactly.
pub fn certificate_from_dual(asm: &Assemblage, dual: &FarkasDual) -> Result<SteeringCertificate> {
    let n = asm.n_settings();
    let scale = dual.y.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if !(scale > 0.0) {
        return Err(Error::NotFound);
    }
    let y: Vec<f64> = dual.y.iter().map(|v| v / scale).collect();
    let t = &y[4 * n..4 * n + 4];
    let shared = [t[0] / n as f64, t[1] / n as f64, t[2] / n as f64, t[3] / n as f64];
    let functionals: Vec<[[f64; 4]; 2]> = (0..n)
        .map(|k| {
            let yk = &y[4 * k..4 * k + 4];
            let plus = [
                yk[0] + shared[0],
                yk[1] + shared[1],
                yk[2] + shared[2],
                yk[3] + shared[3],
            ];
            [plus, shared]
        })
        .collect();

    // closed-form bound: Σ_k F_{λ(k)|k} = Y_T + Σ_{k∈λ} Y_k
    let mut reduced = vec![0.0; 4 * n + 4];
    for (k, f) in functionals.iter().enumerate() {
        for mu in 0..4 {
            reduced[4 * k + mu] = f[0][mu] - f[1][mu];
            reduced[4 * n + mu] += f[1][mu];
        }
    }
    let lhs_bound = price_all(&reduced, n).value;
    let violation: f64 = functionals
        .iter()
        .zip(asm.blocks())
        .map(|(f, s)| {
            let cp = qubit_coords(&s[0]);
            let cm = qubit_coords(&s[1]);
            // tr((c₀I + c·σ) σ) = Σ_μ c_μ tr(σ_μ σ)
            (0..4).map(|mu| f[0][mu] * cp[mu] + f[1][mu] * cm[mu]).sum::<f64>()
        })
        .sum();
    let margin = violation - lhs_bound * asm.total().trace().re;
    if margin < MIN_MARGIN {
        return Err(Error::NotFound);
    }
    Ok(SteeringCertificate {
        functionals,
        lhs_bound,
        violation,
        margin,
    })
}

/// Searches for a verified steering certificate for `asm`.
pub fn steering_certificate(asm: &Assemblage) -> Result<SteeringCertificate> {
    steering_certificate_with(asm, &LpSettings::default())
}

pub fn steering_certificate_with(
    asm: &Assemblage,
    settings: &LpSettings,
) -> Result<SteeringCertificate> {
    match lhs_feasible_with(asm, settings) {
        Ok(LhsOutcome::Infeasible(dual)) => certificate_from_dual(asm, &dual),
        _ => Err(Error::NotFound),
    }
}
