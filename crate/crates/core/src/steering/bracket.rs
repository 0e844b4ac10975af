use serde::{Deserialize, Serialize};

use super::assemblage::{assemblage, Assemblage};
use super::certificate::{certificate_from_dual, SteeringCertificate};
use super::lhs::{lhs_feasible_with, LhsModel, LhsOutcome, LpSettings};
use super::mesh::DirectionMesh;
use crate::qmat::{swap_matrix, ComplexMatrix, DensityMatrix, Side};
use crate::states::depolarize_alice_matrix;
use crate::{Error, Result};

pub const DEFAULT_BISECTION_STEPS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    AtoB,
    BtoA,
}

impl Direction {
    pub fn steering_party(self) -> Side {
        match self {
            Direction::AtoB => Side::A,
            Direction::BtoA => Side::B,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::AtoB => "AtoB",
            Direction::BtoA => "BtoA",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "atob" | "ab" | "a2b" => Ok(Direction::AtoB),
            "btoa" | "ba" | "b2a" => Ok(Direction::BtoA),
            _ => Err(Error::Parse(format!("unknown direction {s:?}"))),
        }
    }
}

/// Result of one depolarization probe.
#[derive(Clone, Debug)]
pub enum Probe {
    Unsteerable(LhsModel),
    Steerable(SteeringCertificate),
    /// LP infeasible without a certificate above the margin threshold, or
    /// the solver hit its iteration cap.
    Indeterminate,
}

/// The state viewed with the steering party in slot A, so that a
/// direction's noise is always applied with [`depolarize_alice_matrix`].
pub fn oriented(rho: &ComplexMatrix, direction: Direction) -> Result<ComplexMatrix> {
    match direction {
        Direction::AtoB => Ok(rho.clone()),
        Direction::BtoA => swap_matrix(rho),
    }
}

/// LP input for `ρ^(x)` in the given direction.
pub fn probe_assemblage(
    rho: &ComplexMatrix,
    direction: Direction,
    mesh: &DirectionMesh,
    x: f64,
) -> Result<Assemblage> {
    let chi = depolarize_alice_matrix(&oriented(rho, direction)?, x)?;
    assemblage(&chi, mesh, Side::A)
}

/// Runs the LP on `ρ^(x)` and packages the answer with its evidence.
pub fn probe(
    rho: &ComplexMatrix,
    direction: Direction,
    mesh: &DirectionMesh,
    x: f64,
    settings: &LpSettings,
) -> Result<Probe> {
    let asm = probe_assemblage(rho, direction, mesh, x)?;
    Ok(match lhs_feasible_with(&asm, settings) {
        Ok(LhsOutcome::Feasible(model)) => Probe::Unsteerable(model),
        Ok(LhsOutcome::Infeasible(dual)) => match certificate_from_dual(&asm, &dual) {
            Ok(cert) => Probe::Steerable(cert),
            Err(_) => Probe::Indeterminate,
        },
        Err(Error::IterationLimit(_)) => Probe::Indeterminate,
        Err(e) => return Err(e),
    })
}

/// Two-sided enclosure of the all-projective critical radius for one
/// direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusBracket {
    pub direction: Direction,
    pub lo: f64,
    /// `None` when no depolarization up to `1/η` was certified steerable.
    pub hi: Option<f64>,
    pub eta: f64,
    pub mesh_size: usize,
    /// Largest mesh-feasible depolarization; `lo = eta * lo_x`.
    pub lo_x: f64,
    pub lo_certificate: LhsModel,
    pub hi_certificate: Option<SteeringCertificate>,
    pub indeterminate_probes: usize,
}

/// Flat JSON form written by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketSummary {
    pub direction: Direction,
    pub lo: f64,
    pub hi: Option<f64>,
    pub eta: f64,
    pub mesh_size: usize,
    pub lhs_residual: f64,
    pub certificate_margin: Option<f64>,
}

impl RadiusBracket {
    pub fn summary(&self) -> BracketSummary {
        BracketSummary {
            direction: self.direction,
            lo: self.lo,
            hi: self.hi,
            eta: self.eta,
            mesh_size: self.mesh_size,
            lhs_residual: self.lo_certificate.residual,
            certificate_margin: self.hi_certificate.as_ref().map(|c| c.margin),
        }
    }

    pub fn width(&self) -> Option<f64> {
        self.hi.map(|h| h - self.lo)
    }

    /// Re-checks both sides against freshly built assemblages: the LHS model
    /// at `lo_x` and the certificate at `hi`.
    pub fn verify(&self, rho: &ComplexMatrix, mesh: &DirectionMesh, model_tol: f64) -> Result<bool> {
        let lo_asm = probe_assemblage(rho, self.direction, mesh, self.lo_x)?;
        let lo_ok = self.lo_certificate.is_well_formed()
            && self.lo_certificate.deviation_from(&lo_asm) <= model_tol
            && (self.lo - self.eta * self.lo_x).abs() <= 1e-12;
        let hi_ok = match (self.hi, &self.hi_certificate) {
            (Some(h), Some(cert)) => cert.verify(&probe_assemblage(rho, self.direction, mesh, h)?),
            (None, None) => true,
            _ => false,
        };
        Ok(lo_ok && hi_ok && self.hi.map_or(true, |h| self.lo <= h))
    }
}

/// Bisects `x ∈ [0, 1/η]`.
///
/// Every feasible probe raises `lo` (scaled by `η`), every certified probe
/// lowers `hi`, and indeterminate probes shrink the search interval from
/// above without touching `hi`, so neither side is ever moved without its
/// evidence.
pub fn critical_radius_bracket(
    rho: &DensityMatrix,
    direction: Direction,
    mesh: &DirectionMesh,
    bisection_steps: usize,
    tol: f64,
) -> Result<RadiusBracket> {
    critical_radius_bracket_with(
        rho.matrix(),
        direction,
        mesh,
        bisection_steps,
        &LpSettings::with_tol(tol),
    )
}

pub fn critical_radius_bracket_with(
    rho: &ComplexMatrix,
    direction: Direction,
    mesh: &DirectionMesh,
    bisection_steps: usize,
    settings: &LpSettings,
) -> Result<RadiusBracket> {
    rho.check_dim(4)?;
    let eta = mesh.eta()?;
    let x_cap = 1.0 / eta;
    let mut indeterminate = 0usize;

    let mut lo_model = match probe(rho, direction, mesh, 0.0, settings)? {
        Probe::Unsteerable(m) => m,
        // ρ^(0) is a product operator; this only fails on numerical trouble
        _ => return Err(Error::IterationLimit(settings.max_iterations)),
    };
    let mut a = 0.0;
    let mut b = x_cap;
    let mut hi: Option<(f64, SteeringCertificate)> = None;

    match probe(rho, direction, mesh, x_cap, settings)? {
        Probe::Unsteerable(m) => {
            lo_model = m;
            a = x_cap;
        }
        Probe::Steerable(c) => hi = Some((x_cap, c)),
        Probe::Indeterminate => indeterminate += 1,
    }

    if a < x_cap {
        for _ in 0..bisection_steps {
            let mid = 0.5 * (a + b);
            match probe(rho, direction, mesh, mid, settings)? {
                Probe::Unsteerable(m) => {
                    lo_model = m;
                    a = mid;
                }
                Probe::Steerable(c) => {
                    hi = Some((mid, c));
                    b = mid;
                }
                Probe::Indeterminate => {
                    indeterminate += 1;
                    b = mid;
                }
            }
        }
    }

    // η · (1/η) can round just below 1
    let lo = if a == x_cap { 1.0 } else { eta * a };
    let (hi, hi_certificate) = match hi {
        Some((x, c)) => (Some(x), Some(c)),
        None => (None, None),
    };
    Ok(RadiusBracket {
        direction,
        lo,
        hi,
        eta,
        mesh_size: mesh.len(),
        lo_x: a,
        lo_certificate: lo_model,
        hi_certificate,
        indeterminate_probes: indeterminate,
    })
}
