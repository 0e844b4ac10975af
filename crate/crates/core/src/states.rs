//! State families: the mixed singlet/product family, its Alice-side
//! depolarization, closest-parameter retrieval, PPT separability, and the
//! θ-family with its analytic one-way steering predicate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qmat::{
    hermitian_eigenvalues, partial_trace_matrix, partial_transpose, psi_plus_projector,
    ComplexMatrix, DensityMatrix, Side,
};
use crate::{Error, Result};

/// Minimum partial-transpose eigenvalue accepted as separable.
pub const PPT_TOL: f64 = 1e-10;

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::ParamOutOfRange(format!("{name} = {v} not in [0, 1]")));
    }
    Ok(())
}

/// Singlet weight `p` and Alice bias `r` of
/// `ρ = p|Ψ+⟩⟨Ψ+| + (1-p) ρ_r ⊗ I/2`, `ρ_r = (I + rσz)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    p: f64,
    r: f64,
}

impl FamilyParams {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("r", r)?;
        Ok(Self { p, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// `ρ_r = (I + rσz)/2`.
pub fn biased_qubit(r: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[0.5 * (1.0 + r), 0.5 * (1.0 - r)])
}

pub fn family_matrix(p: f64, r: f64) -> ComplexMatrix {
    let product = biased_qubit(r).kron(&ComplexMatrix::identity(2).scale(0.5));
    &psi_plus_projector().scale(p) + &product.scale(1.0 - p)
}

pub fn family_state(params: FamilyParams) -> DensityMatrix {
    DensityMatrix::new(family_matrix(params.p, params.r)).expect("family member is a state")
}

/// Werner state `x|Ψ+⟩⟨Ψ+| + (1-x) I/4`.
pub fn werner_state(x: f64) -> Result<DensityMatrix> {
    check_unit("x", x)?;
    Ok(family_state(FamilyParams::new(x, 0.0)?))
}

/// `ρ^(x) = xρ + (1-x) I/2 ⊗ ρ_B` on an arbitrary Hermitian 4×4 operator.
pub fn depolarize_alice_matrix(m: &ComplexMatrix, x: f64) -> Result<ComplexMatrix> {
    let rho_b = partial_trace_matrix(m, Side::A)?;
    let noise = ComplexMatrix::identity(2).scale(0.5).kron(&rho_b);
    Ok(&m.scale(x) + &noise.scale(1.0 - x))
}

/// Output of [`depolarize_alice`]: for `x > 1` the result can leave the
/// state space, so it is returned as a bare Hermitian matrix with a flag.
#[derive(Clone, Debug)]
pub struct Depolarized {
    pub matrix: ComplexMatrix,
    pub psd: bool,
}

pub fn depolarize_alice(rho: &DensityMatrix, x: f64) -> Result<Depolarized> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::ParamOutOfRange(format!("x = {x} must be >= 0")));
    }
    let matrix = depolarize_alice_matrix(rho.matrix(), x)?;
    let min = *hermitian_eigenvalues(&matrix)?.last().unwrap();
    Ok(Depolarized {
        psd: min >= -rho.tolerance(),
        matrix,
    })
}

/// Closest family member in Hilbert-Schmidt distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievedParams {
    pub p: f64,
    pub r: f64,
    pub residual: f64,
    /// Raw least-squares solution fell outside `[0,1]²` and was clamped.
    pub clamped: bool,
    /// `p ≥ 1 - 1e-9`, so `r` is undefined and reported as 0.
    pub degenerate: bool,
}

/// Direction `|Ψ+⟩⟨Ψ+| - I/4` of the affine family.
fn singlet_direction() -> ComplexMatrix {
    &psi_plus_projector() - &ComplexMatrix::identity(4).scale(0.25)
}

/// Direction `|0⟩⟨0| ⊗ I/2 - I/4` of the affine family.
fn bias_direction() -> ComplexMatrix {
    &biased_qubit(1.0).kron(&ComplexMatrix::identity(2).scale(0.5))
        - &ComplexMatrix::identity(4).scale(0.25)
}

/// Least-squares fit of `(p, q = (1-p) r)` in the affine parametrisation
/// `I/4 + p·M1 + q·M2`; the two directions are orthogonal, so the normal
/// equations decouple.
pub fn retrieve_params(rho: &DensityMatrix) -> Result<RetrievedParams> {
    rho.matrix().check_dim(4)?;
    let centered = rho.matrix() - &ComplexMatrix::identity(4).scale(0.25);
    let m1 = singlet_direction();
    let m2 = bias_direction();
    let p_raw = centered.hs_inner(&m1) / m1.hs_inner(&m1);
    let q_raw = centered.hs_inner(&m2) / m2.hs_inner(&m2);

    let p = p_raw.clamp(0.0, 1.0);
    let degenerate = p >= 1.0 - 1e-9;
    let (r, r_clamped) = if degenerate {
        (0.0, false)
    } else {
        let r_raw = q_raw / (1.0 - p);
        (r_raw.clamp(0.0, 1.0), !(0.0..=1.0).contains(&r_raw))
    };
    let clamped = r_clamped || p != p_raw;
    let residual = (rho.matrix() - &family_matrix(p, r)).frobenius_norm();
    Ok(RetrievedParams {
        p,
        r,
        residual,
        clamped,
        degenerate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptResult {
    pub separable: bool,
    pub min_pt_eigenvalue: f64,
}

/// Peres-Horodecki test, exact for two qubits.
pub fn is_separable_ppt(rho: &DensityMatrix) -> Result<PptResult> {
    let pt = partial_transpose(rho.matrix(), Side::B)?;
    let min = *hermitian_eigenvalues(&pt)?.last().unwrap();
    Ok(PptResult {
        separable: min >= -PPT_TOL,
        min_pt_eigenvalue: min,
    })
}

/// Bisects the PPT boundary in `p` along a fixed-`r` line of the family.
/// Assumes separability at `p = 0` and entanglement at `p = 1`.
pub fn ppt_boundary_p(r: f64, tol: f64) -> Result<f64> {
    check_unit("r", r)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_separable_ppt(&family_state(FamilyParams::new(mid, r)?))?.separable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parameters of `ρ = p|θ⟩⟨θ| + (1-p) I/2 ⊗ ρ_B`,
/// `|θ⟩ = cos θ|00⟩ + sin θ|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaFamilyParams {
    theta: f64,
    p: f64,
}

impl ThetaFamilyParams {
    pub fn new(theta: f64, p: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
            return Err(Error::ParamOutOfRange(format!(
                "theta = {theta} not in [0, pi/4]"
            )));
        }
        check_unit("p", p)?;
        Ok(Self { theta, p })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

pub fn theta_state(params: ThetaFamilyParams) -> DensityMatrix {
    let (s, c) = params.theta.sin_cos();
    let z = Complex64::new(0.0, 0.0);
    let ket = [Complex64::new(c, 0.0), z, z, Complex64::new(s, 0.0)];
    let pure = ComplexMatrix::outer(&ket);
    let rho_b = ComplexMatrix::from_real_diag(&[c * c, s * s]);
    let noise = ComplexMatrix::identity(2).scale(0.5).kron(&rho_b);
    let m = &pure.scale(params.p) + &noise.scale(1.0 - params.p);
    DensityMatrix::new(m).expect("theta-family member is a state")
}

/// Sufficient condition for A→B steerable and B→A unsteerable:
/// `p > 1/2` and `cos²(2θ) ≥ (2p-1) / ((2-p) p³)`.
pub fn bowles_one_way_predicate(params: ThetaFamilyParams) -> bool {
    let p = params.p;
    if p <= 0.5 {
        return false;
    }
    let lhs = (2.0 * params.theta).cos().powi(2);
    let rhs = (2.0 * p - 1.0) / ((2.0 - p) * p.powi(3));
    lhs >= rhs
}
