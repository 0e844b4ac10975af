//! Local-hidden-state feasibility as a semi-infinite linear program.
//!
//! Unknowns are nonnegative weights `c_{λ,ω}` on columns made of a
//! deterministic response map `λ` (one bit per setting, set = outcome `+`)
//! and a pure hidden state `ω = (I + w·σ)/2` anywhere on the Bloch sphere.
//! The equality rows, in Pauli coordinates `tr(σ_μ ·)`, are
//!
//! ```text
//! Σ c_{λ,ω} [λ(k) = +] ω = σ_{+|k}     k = 1..N   (4N rows)
//! Σ c_{λ,ω} ω            = Σ_a σ_{a|1}            (4 rows)
//! ```
//!
//! Phase 1 of the revised simplex method starts from an all-artificial basis
//! and generates columns on the fly. For a dual vector `y` the column value
//! `yᵀa` for strategy `λ` is `c₀(λ) + c(λ)·w`, maximised over the sphere in
//! closed form by `w = c/|c|`, so pricing enumerates all `2^N` strategies
//! (in Gray-code order) and is exact. At a phase-1 optimum with positive
//! objective the final dual is a Farkas certificate, which
//! [`super::certificate`] turns into a steering functional.

use serde::{Deserialize, Serialize};

use super::assemblage::Assemblage;
use crate::qmat::{qubit_operator, ComplexMatrix};
use crate::{Error, Result};

/// Solver tolerances. All LP numerics read from here.
#[derive(Clone, Copy, Debug)]
pub struct LpSettings {
    /// Phase-1 objective at or below which the assemblage counts as feasible.
    pub feasibility_tol: f64,
    /// Minimum column value `yᵀa` for a column to enter the basis.
    pub pricing_tol: f64,
    /// Largest entrywise reconstruction error accepted for an LHS model.
    pub model_tol: f64,
    pub max_iterations: usize,
    /// Rebuild the basis inverse from scratch every this many pivots.
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_limit: usize,
}

impl Default for LpSettings {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            pricing_tol: 1e-10,
            model_tol: 1e-8,
            max_iterations: 20_000,
            refactor_every: 50,
            stall_limit: 200,
        }
    }
}

impl LpSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            feasibility_tol: tol,
            ..Self::default()
        }
    }
}

/// One column of an LHS model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhsColumn {
    /// Bit `k` set means outcome `+` for setting `k`.
    pub strategy: u32,
    /// Bloch vector of the hidden pure state.
    pub bloch: [f64; 3],
    pub weight: f64,
}

/// An explicit local-hidden-state decomposition of an assemblage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhsModel {
    pub columns: Vec<LhsColumn>,
    /// Largest entrywise deviation between the model and its target.
    pub residual: f64,
}

impl LhsModel {
    /// Rebuilds `σ_{a|k}` from the columns for `n_settings` settings.
    pub fn reconstruct(&self, n_settings: usize) -> Vec<[ComplexMatrix; 2]> {
        let zero = ComplexMatrix::zeros(2);
        let mut out = vec![[zero.clone(), zero]; n_settings];
        for col in &self.columns {
            let b = col.bloch;
            let omega = qubit_operator(0.5 * col.weight, [
                0.5 * col.weight * b[0],
                0.5 * col.weight * b[1],
                0.5 * col.weight * b[2],
            ]);
            for (k, pair) in out.iter_mut().enumerate() {
                let slot = if col.strategy >> k & 1 == 1 { 0 } else { 1 };
                pair[slot] = &pair[slot] + &omega;
            }
        }
        out
    }

    /// Largest entrywise gap to `asm`; independent of how the model was found.
    pub fn deviation_from(&self, asm: &Assemblage) -> f64 {
        let rebuilt = self.reconstruct(asm.n_settings());
        rebuilt
            .iter()
            .zip(asm.blocks())
            .flat_map(|(m, t)| [m[0].max_abs_diff(&t[0]), m[1].max_abs_diff(&t[1])])
            .fold(0.0, f64::max)
    }

    /// Every weight nonnegative, every Bloch vector inside the unit ball.
    pub fn is_well_formed(&self) -> bool {
        self.columns.iter().all(|c| {
            let n2 = c.bloch.iter().map(|x| x * x).sum::<f64>();
            c.weight >= 0.0 && n2.sqrt() <= 1.0 + 1e-12
        })
    }
}

/// Final dual of an infeasible phase 1 (original row signs).
#[derive(Clone, Debug)]
pub struct FarkasDual {
    pub y: Vec<f64>,
    pub phase1_objective: f64,
    /// `max_{λ,ω} yᵀa` at termination.
    pub max_price: f64,
}

#[derive(Clone, Debug)]
pub enum LhsOutcome {
    Feasible(LhsModel),
    Infeasible(FarkasDual),
}

/// Best column for a dual vector: strategy, Bloch vector and `yᵀa`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Priced {
    pub strategy: u32,
    pub bloch: [f64; 3],
    pub value: f64,
}

fn best_direction(acc: [f64; 4]) -> ([f64; 3], f64) {
    let n = (acc[1] * acc[1] + acc[2] * acc[2] + acc[3] * acc[3]).sqrt();
    if n > 0.0 {
        ([acc[1] / n, acc[2] / n, acc[3] / n], acc[0] + n)
    } else {
        ([0.0, 0.0, 1.0], acc[0])
    }
}

/// Exact pricing: `max_{λ, |w|=1} yᵀa(λ, w)` over all `2^N` strategies.
pub(crate) fn price_all(y: &[f64], n_settings: usize) -> Priced {
    let t = 4 * n_settings;
    let mut acc = [y[t], y[t + 1], y[t + 2], y[t + 3]];
    let (bloch, value) = best_direction(acc);
    let mut best = Priced {
        strategy: 0,
        bloch,
        value,
    };
    let mut gray: u32 = 0;
    for g in 1u32..(1u32 << n_settings) {
        let bit = g.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let sign = if gray >> bit & 1 == 1 { 1.0 } else { -1.0 };
        for mu in 0..4 {
            acc[mu] += sign * y[4 * bit + mu];
        }
        let (bloch, value) = best_direction(acc);
        if value > best.value {
            best = Priced {
                strategy: gray,
                bloch,
                value,
            };
        }
    }
    best
}

fn column_vector(strategy: u32, w: [f64; 3], n_settings: usize) -> Vec<f64> {
    let mut a = vec![0.0; 4 * n_settings + 4];
    let block = [1.0, w[0], w[1], w[2]];
    for k in 0..n_settings {
        if strategy >> k & 1 == 1 {
            a[4 * k..4 * k + 4].copy_from_slice(&block);
        }
    }
    a[4 * n_settings..].copy_from_slice(&block);
    a
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    Artificial(usize),
    Column(usize),
}

struct Column {
    strategy: u32,
    bloch: [f64; 3],
    /// Row-sign-adjusted coefficients.
    a: Vec<f64>,
}

struct Phase1<'a> {
    settings: &'a LpSettings,
    n_settings: usize,
    m: usize,
    sign: Vec<f64>,
    rhs: Vec<f64>,
    columns: Vec<Column>,
    basis: Vec<Var>,
    binv: Vec<f64>,
    xb: Vec<f64>,
}

impl<'a> Phase1<'a> {
    fn new(asm: &Assemblage, settings: &'a LpSettings) -> Self {
        let raw = asm.lp_rhs();
        let m = raw.len();
        let sign: Vec<f64> = raw.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let rhs: Vec<f64> = raw.iter().zip(&sign).map(|(b, s)| b * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Self {
            settings,
            n_settings: asm.n_settings(),
            m,
            sign,
            xb: rhs.clone(),
            rhs,
            columns: Vec::new(),
            basis: (0..m).map(Var::Artificial).collect(),
            binv,
        }
    }

    fn var_index(&self, v: Var) -> usize {
        match v {
            Var::Artificial(i) => i,
            Var::Column(j) => self.m + j,
        }
    }

    fn coeffs(&self, v: Var) -> Vec<f64> {
        match v {
            Var::Artificial(i) => {
                let mut e = vec![0.0; self.m];
                e[i] = 1.0;
                e
            }
            Var::Column(j) => self.columns[j].a.clone(),
        }
    }

    fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(v, _)| matches!(v, Var::Artificial(_)))
            .map(|(_, x)| x)
            .sum()
    }

    /// Simplex multipliers in original row signs.
    fn dual(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, v) in self.basis.iter().enumerate() {
            if matches!(v, Var::Artificial(_)) {
                for i in 0..m {
                    y[i] += self.binv[r * m + i];
                }
            }
        }
        for i in 0..m {
            y[i] *= self.sign[i];
        }
        y
    }

    fn ftran(&self, a: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|r| (0..m).map(|i| self.binv[r * m + i] * a[i]).sum())
            .collect()
    }

    /// Gauss-Jordan inverse of the current basis; leaves the old inverse in
    /// place if the basis looks singular.
    fn refactor(&mut self) {
        let m = self.m;
        let w = 2 * m;
        let mut aug = vec![0.0; m * w];
        for (c, &v) in self.basis.iter().enumerate() {
            let col = self.coeffs(v);
            for r in 0..m {
                aug[r * w + c] = col[r];
            }
        }
        for r in 0..m {
            aug[r * w + m + r] = 1.0;
        }
        for c in 0..m {
            let piv = (c..m)
                .max_by(|&a, &b| aug[a * w + c].abs().total_cmp(&aug[b * w + c].abs()))
                .unwrap();
            if aug[piv * w + c].abs() < 1e-13 {
                return;
            }
            if piv != c {
                for k in 0..w {
                    aug.swap(piv * w + k, c * w + k);
                }
            }
            let d = aug[c * w + c];
            for k in 0..w {
                aug[c * w + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = aug[r * w + c];
                    if f != 0.0 {
                        for k in 0..w {
                            aug[r * w + k] -= f * aug[c * w + k];
                        }
                    }
                }
            }
        }
        for r in 0..m {
            self.binv[r * m..(r + 1) * m].copy_from_slice(&aug[r * w + m..(r + 1) * w]);
        }
        self.xb = self.ftran(&self.rhs.clone());
        for x in &mut self.xb {
            if *x < 0.0 && *x > -1e-12 {
                *x = 0.0;
            }
        }
    }

    fn pivot(&mut self, row: usize, d: &[f64], entering: Var) {
        let m = self.m;
        let dr = d[row];
        for k in 0..m {
            self.binv[row * m + k] /= dr;
        }
        self.xb[row] /= dr;
        for i in 0..m {
            if i != row && d[i] != 0.0 {
                let f = d[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[row * m + k];
                }
                self.xb[i] -= f * self.xb[row];
                if self.xb[i] < 0.0 && self.xb[i] > -1e-12 {
                    self.xb[i] = 0.0;
                }
            }
        }
        self.basis[row] = entering;
    }

    fn model(&self, asm: &Assemblage) -> LhsModel {
        let columns: Vec<LhsColumn> = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter_map(|(v, &x)| match v {
                Var::Column(j) if x > 0.0 => Some(LhsColumn {
                    strategy: self.columns[*j].strategy,
                    bloch: self.columns[*j].bloch,
                    weight: x,
                }),
                _ => None,
            })
            .collect();
        let mut model = LhsModel {
            columns,
            residual: 0.0,
        };
        model.residual = model.deviation_from(asm);
        model
    }

    fn solve(mut self, asm: &Assemblage) -> Result<LhsOutcome> {
        let s = *self.settings;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let raw_rhs = asm.lp_rhs();

        for iter in 0..s.max_iterations {
            if iter > 0 && iter % s.refactor_every == 0 {
                self.refactor();
            }
            let obj = self.objective();
            if obj <= s.feasibility_tol {
                self.refactor();
                let model = self.model(asm);
                if model.residual <= s.model_tol {
                    return Ok(LhsOutcome::Feasible(model));
                }
            }

            let y = self.dual();
            let priced = price_all(&y, self.n_settings);
            let y_dot_b: f64 = y.iter().zip(&raw_rhs).map(|(a, b)| a * b).sum();
            let scale = y.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
            let gap = (y_dot_b - priced.value) / scale;
            // optimal, or the current dual already separates b from the cone
            if priced.value <= s.pricing_tol || gap > 1e-7 {
                if obj <= s.feasibility_tol {
                    // feasible objective but an ill-conditioned model
                    return Err(Error::IterationLimit(iter));
                }
                return Ok(LhsOutcome::Infeasible(FarkasDual {
                    y,
                    phase1_objective: obj,
                    max_price: priced.value,
                }));
            }

            let entering = if bland {
                self.bland_entering(&y).unwrap_or_else(|| self.push_column(priced))
            } else {
                self.push_column(priced)
            };
            let a = self.coeffs(entering);
            let d = self.ftran(&a);

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if d[r] <= 1e-11 {
                    continue;
                }
                let theta = self.xb[r].max(0.0) / d[r];
                leave = match leave {
                    None => Some((r, theta)),
                    Some((lr, lt)) => {
                        if theta < lt - 1e-12 {
                            Some((r, theta))
                        } else if theta <= lt + 1e-12 && self.prefer_leaving(r, lr, &d, bland) {
                            Some((r, theta.min(lt)))
                        } else {
                            Some((lr, lt))
                        }
                    }
                };
            }
            let Some((row, theta)) = leave else {
                // unbounded direction cannot occur in phase 1; rebuild and retry
                self.refactor();
                continue;
            };
            if theta <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > s.stall_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, &d, entering);
        }
        Err(Error::IterationLimit(s.max_iterations))
    }

    fn push_column(&mut self, priced: Priced) -> Var {
        let mut a = column_vector(priced.strategy, priced.bloch, self.n_settings);
        for (ai, s) in a.iter_mut().zip(&self.sign) {
            *ai *= s;
        }
        self.columns.push(Column {
            strategy: priced.strategy,
            bloch: priced.bloch,
            a,
        });
        Var::Column(self.columns.len() - 1)
    }

    /// Lowest-index pooled column with positive reduced value.
    fn bland_entering(&self, y: &[f64]) -> Option<Var> {
        let ytil: Vec<f64> = y.iter().zip(&self.sign).map(|(a, s)| a * s).collect();
        (0..self.columns.len())
            .map(Var::Column)
            .filter(|v| !self.basis.contains(v))
            .find(|&v| {
                let a = &self.columns[match v {
                    Var::Column(j) => j,
                    Var::Artificial(_) => unreachable!(),
                }]
                .a;
                a.iter().zip(&ytil).map(|(x, y)| x * y).sum::<f64>() > self.settings.pricing_tol
            })
    }

    fn prefer_leaving(&self, cand: usize, current: usize, d: &[f64], bland: bool) -> bool {
        let (vc, vr) = (self.basis[cand], self.basis[current]);
        if bland {
            return self.var_index(vc) < self.var_index(vr);
        }
        match (vc, vr) {
            (Var::Artificial(_), Var::Column(_)) => true,
            (Var::Column(_), Var::Artificial(_)) => false,
            _ => d[cand] > d[current],
        }
    }
}

/// Decides whether `asm` admits a local-hidden-state model.
///
/// `tol` is the phase-1 objective threshold for feasibility. Failure to
/// converge is reported as [`Error::IterationLimit`] and never as a verdict.
pub fn lhs_feasible(asm: &Assemblage, tol: f64) -> Result<LhsOutcome> {
    lhs_feasible_with(asm, &LpSettings::with_tol(tol))
}

pub fn lhs_feasible_with(asm: &Assemblage, settings: &LpSettings) -> Result<LhsOutcome> {
    if asm.n_settings() > super::mesh::MAX_DIRECTIONS {
        return Err(Error::MeshTooLarge {
            max: super::mesh::MAX_DIRECTIONS,
            got: asm.n_settings(),
        });
    }
    Phase1::new(asm, settings).solve(asm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{psi_plus_projector, Side};
    use crate::states::{depolarize_alice_matrix, family_matrix};
    use crate::steering::assemblage::assemblage;
    use crate::steering::mesh::{fibonacci_mesh, octahedral_mesh};

    fn brute_price(y: &[f64], n: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for lam in 0u32..(1 << n) {
            let mut acc = [0.0; 4];
            for mu in 0..4 {
                acc[mu] = y[4 * n + mu];
                for k in 0..n {
                    if lam >> k & 1 == 1 {
                        acc[mu] += y[4 * k + mu];
                    }
                }
            }
            best = best.max(best_direction(acc).1);
        }
        best
    }

    #[test]
    fn gray_code_pricing_matches_brute_force() {
        let n = 5;
        let y: Vec<f64> = (0..4 * n + 4).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let got = price_all(&y, n);
        assert!((got.value - brute_price(&y, n)).abs() < 1e-12);
        let a = column_vector(got.strategy, got.bloch, n);
        let direct: f64 = a.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!((direct - got.value).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_is_feasible() {
        let chi = ComplexMatrix::identity(4).scale(0.25);
        let asm = assemblage(&chi, &fibonacci_mesh(5).unwrap(), Side::A).unwrap();
        match lhs_feasible(&asm, 1e-9).unwrap() {
            LhsOutcome::Feasible(model) => {
                assert!(model.residual <= 1e-8);
                assert!(model.is_well_formed());
            }
            LhsOutcome::Infeasible(_) => panic!("I/4 must be LHS"),
        }
    }

    #[test]
    fn singlet_octahedral_infeasible() {
        let asm = assemblage(&psi_plus_projector(), &octahedral_mesh(), Side::A).unwrap();
        let out = lhs_feasible(&asm, 1e-9).unwrap();
        let LhsOutcome::Infeasible(dual) = out else {
            panic!("singlet must be steerable with three settings")
        };
        let b: f64 = dual.y.iter().zip(asm.lp_rhs()).map(|(y, b)| y * b).sum();
        assert!(b > brute_price(&dual.y, 3) + 1e-6);
    }

    #[test]
    fn werner_half_octahedral_feasible() {
        let chi = depolarize_alice_matrix(&psi_plus_projector(), 0.5).unwrap();
        let asm = assemblage(&chi, &octahedral_mesh(), Side::A).unwrap();
        let LhsOutcome::Feasible(model) = lhs_feasible(&asm, 1e-9).unwrap() else {
            panic!("Werner 0.5 is below the three-setting threshold")
        };
        assert!(model.deviation_from(&asm) <= 1e-8);
        assert!(model.is_well_formed());
    }

    #[test]
    fn biased_family_model_reconstructs() {
        let chi = depolarize_alice_matrix(&family_matrix(0.3, 0.9), 0.8).unwrap();
        let asm = assemblage(&chi, &fibonacci_mesh(9).unwrap(), Side::B).unwrap();
        if let LhsOutcome::Feasible(model) = lhs_feasible(&asm, 1e-9).unwrap() {
            assert!(model.deviation_from(&asm) <= 1e-8);
            assert!(model.is_well_formed());
        }
    }
}
