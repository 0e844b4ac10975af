use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bracket::{probe, probe_assemblage, Direction, Probe};
use super::certificate::SteeringCertificate;
use super::lhs::{LhsModel, LpSettings};
use super::mesh::DirectionMesh;
use crate::qmat::{ComplexMatrix, DensityMatrix};
use crate::states::{family_state, is_separable_ppt, FamilyParams, PptResult};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DirectionVerdict {
    CertifiedSteerable,
    CertifiedUnsteerable,
    Indeterminate,
}

impl DirectionVerdict {
    /// Token used in region CSV files.
    pub fn csv_token(self) -> &'static str {
        match self {
            DirectionVerdict::CertifiedSteerable => "STEERABLE",
            DirectionVerdict::CertifiedUnsteerable => "UNSTEERABLE",
            DirectionVerdict::Indeterminate => "INDETERMINATE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HierarchyLabel {
    Separable,
    TwoWayUnsteerable,
    OneWayAToB,
    OneWayBToA,
    TwoWaySteerable,
    Indeterminate,
}

impl HierarchyLabel {
    pub fn name(self) -> &'static str {
        match self {
            HierarchyLabel::Separable => "SEPARABLE",
            HierarchyLabel::TwoWayUnsteerable => "TWO_WAY_UNSTEERABLE",
            HierarchyLabel::OneWayAToB => "ONE_WAY_A_TO_B",
            HierarchyLabel::OneWayBToA => "ONE_WAY_B_TO_A",
            HierarchyLabel::TwoWaySteerable => "TWO_WAY_STEERABLE",
            HierarchyLabel::Indeterminate => "INDETERMINATE",
        }
    }

    pub fn from_pair(separable: bool, ab: DirectionVerdict, ba: DirectionVerdict) -> Self {
        use DirectionVerdict::*;
        if separable {
            return HierarchyLabel::Separable;
        }
        match (ab, ba) {
            (CertifiedSteerable, CertifiedSteerable) => HierarchyLabel::TwoWaySteerable,
            (CertifiedSteerable, CertifiedUnsteerable) => HierarchyLabel::OneWayAToB,
            (CertifiedUnsteerable, CertifiedSteerable) => HierarchyLabel::OneWayBToA,
            (CertifiedUnsteerable, CertifiedUnsteerable) => HierarchyLabel::TwoWayUnsteerable,
            _ => HierarchyLabel::Indeterminate,
        }
    }
}

/// Evidence behind one direction's verdict. The certificate refers to
/// `ρ` itself; the model refers to `ρ^(1/η)` on the mesh.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DirectionEvidence {
    pub certificate: Option<SteeringCertificate>,
    pub model: Option<LhsModel>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub steerable_ab: DirectionVerdict,
    pub steerable_ba: DirectionVerdict,
    pub label: HierarchyLabel,
    pub ppt: PptResult,
    pub eta: f64,
    pub mesh_size: usize,
    pub evidence_ab: DirectionEvidence,
    pub evidence_ba: DirectionEvidence,
}

impl Verdict {
    pub fn direction(&self, d: Direction) -> (DirectionVerdict, &DirectionEvidence) {
        match d {
            Direction::AtoB => (self.steerable_ab, &self.evidence_ab),
            Direction::BtoA => (self.steerable_ba, &self.evidence_ba),
        }
    }

    /// Re-verifies every piece of evidence against fresh assemblages built
    /// from `rho`. Verdicts without evidence (SEPARABLE, INDETERMINATE)
    /// trivially pass.
    pub fn verify(&self, rho: &ComplexMatrix, mesh: &DirectionMesh, model_tol: f64) -> Result<bool> {
        let eta = mesh.eta()?;
        for d in [Direction::AtoB, Direction::BtoA] {
            let (v, ev) = self.direction(d);
            let ok = match v {
                DirectionVerdict::CertifiedSteerable => match &ev.certificate {
                    Some(c) => c.verify(&probe_assemblage(rho, d, mesh, 1.0)?),
                    None => false,
                },
                DirectionVerdict::CertifiedUnsteerable if !self.ppt.separable => match &ev.model {
                    Some(m) => {
                        let asm = probe_assemblage(rho, d, mesh, 1.0 / eta)?;
                        m.is_well_formed() && m.deviation_from(&asm) <= model_tol
                    }
                    None => false,
                },
                _ => true,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn classify_direction(
    rho: &ComplexMatrix,
    direction: Direction,
    mesh: &DirectionMesh,
    eta: f64,
    settings: &LpSettings,
) -> Result<(DirectionVerdict, DirectionEvidence)> {
    if let Probe::Steerable(cert) = probe(rho, direction, mesh, 1.0, settings)? {
        return Ok((
            DirectionVerdict::CertifiedSteerable,
            DirectionEvidence {
                certificate: Some(cert),
                model: None,
            },
        ));
    }
    if let Probe::Unsteerable(model) = probe(rho, direction, mesh, 1.0 / eta, settings)? {
        return Ok((
            DirectionVerdict::CertifiedUnsteerable,
            DirectionEvidence {
                certificate: None,
                model: Some(model),
            },
        ));
    }
    Ok((DirectionVerdict::Indeterminate, DirectionEvidence::default()))
}

/// Places `ρ` in the steering hierarchy: PPT first, then per direction a
/// certificate at `x = 1` or an LHS model at `x = 1/η`.
pub fn classify(rho: &DensityMatrix, mesh: &DirectionMesh) -> Result<Verdict> {
    classify_with(rho, mesh, &LpSettings::default())
}

pub fn classify_with(rho: &DensityMatrix, mesh: &DirectionMesh, settings: &LpSettings) -> Result<Verdict> {
    let ppt = is_separable_ppt(rho)?;
    let eta = mesh.eta()?;
    if ppt.separable {
        return Ok(Verdict {
            steerable_ab: DirectionVerdict::CertifiedUnsteerable,
            steerable_ba: DirectionVerdict::CertifiedUnsteerable,
            label: HierarchyLabel::Separable,
            ppt,
            eta,
            mesh_size: mesh.len(),
            evidence_ab: DirectionEvidence::default(),
            evidence_ba: DirectionEvidence::default(),
        });
    }
    let m = rho.matrix();
    let (ab, ba) = rayon::join(
        || classify_direction(m, Direction::AtoB, mesh, eta, settings),
        || classify_direction(m, Direction::BtoA, mesh, eta, settings),
    );
    let ((steerable_ab, evidence_ab), (steerable_ba, evidence_ba)) = (ab?, ba?);
    Ok(Verdict {
        steerable_ab,
        steerable_ba,
        label: HierarchyLabel::from_pair(false, steerable_ab, steerable_ba),
        ppt,
        eta,
        mesh_size: mesh.len(),
        evidence_ab,
        evidence_ba,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionCell {
    pub p: f64,
    pub r: f64,
    pub verdict_ab: DirectionVerdict,
    pub verdict_ba: DirectionVerdict,
    pub label: HierarchyLabel,
}

/// Classifies every `(p, r)` of the family on the grid, rows ordered by
/// `r` then `p`. Runs on the current rayon pool.
pub fn region_scan(p_grid: &[f64], r_grid: &[f64], mesh: &DirectionMesh) -> Result<Vec<RegionCell>> {
    region_scan_with(p_grid, r_grid, mesh, &LpSettings::default(), |_| {})
}

/// As [`region_scan`], calling `progress(done)` as cells finish.
pub fn region_scan_with(
    p_grid: &[f64],
    r_grid: &[f64],
    mesh: &DirectionMesh,
    settings: &LpSettings,
    progress: impl Fn(usize) + Sync,
) -> Result<Vec<RegionCell>> {
    let points: Vec<(f64, f64)> = r_grid
        .iter()
        .flat_map(|&r| p_grid.iter().map(move |&p| (p, r)))
        .collect();
    for &(p, r) in &points {
        FamilyParams::new(p, r)?;
    }
    let done = std::sync::atomic::AtomicUsize::new(0);
    points
        .par_iter()
        .map(|&(p, r)| {
            let rho = family_state(FamilyParams::new(p, r)?);
            let v = classify_with(&rho, mesh, settings)?;
            progress(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1);
            Ok(RegionCell {
                p,
                r,
                verdict_ab: v.steerable_ab,
                verdict_ba: v.steerable_ba,
                label: v.label,
            })
        })
        .collect()
}

/// Writes `p,r,verdict_ab,verdict_ba,label`.
pub fn write_region_csv<W: Write>(cells: &[RegionCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "r", "verdict_ab", "verdict_ba", "label"])?;
    for c in cells {
        w.write_record([
            c.p.to_string(),
            c.r.to_string(),
            c.verdict_ab.csv_token().to_string(),
            c.verdict_ba.csv_token().to_string(),
            c.label.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `n` evenly spaced points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::psi_plus;
    use crate::steering::mesh::fibonacci_mesh;

    #[test]
    fn mixed_is_separable() {
        let v = classify(&DensityMatrix::maximally_mixed(4), &fibonacci_mesh(6).unwrap()).unwrap();
        assert_eq!(v.label, HierarchyLabel::Separable);
        assert_eq!(v.steerable_ab, DirectionVerdict::CertifiedUnsteerable);
        assert_eq!(v.steerable_ba, DirectionVerdict::CertifiedUnsteerable);
    }

    #[test]
    fn singlet_two_way() {
        let rho = DensityMatrix::pure(&psi_plus()).unwrap();
        let mesh = fibonacci_mesh(6).unwrap();
        let v = classify(&rho, &mesh).unwrap();
        assert_eq!(v.label, HierarchyLabel::TwoWaySteerable);
        assert!(v.verify(rho.matrix(), &mesh, 1e-8).unwrap());
    }

    #[test]
    fn label_table() {
        use DirectionVerdict::*;
        assert_eq!(
            HierarchyLabel::from_pair(false, CertifiedSteerable, CertifiedUnsteerable),
            HierarchyLabel::OneWayAToB
        );
        assert_eq!(
            HierarchyLabel::from_pair(false, Indeterminate, CertifiedSteerable),
            HierarchyLabel::Indeterminate
        );
        assert_eq!(
            HierarchyLabel::from_pair(true, CertifiedSteerable, CertifiedSteerable),
            HierarchyLabel::Separable
        );
        for l in [
            HierarchyLabel::Separable,
            HierarchyLabel::OneWayAToB,
            HierarchyLabel::TwoWayUnsteerable,
        ] {
            assert_eq!(serde_json::to_value(l).unwrap(), l.name());
        }
    }

    #[test]
    fn region_csv_shape() {
        let mesh = fibonacci_mesh(3).unwrap();
        let cells = region_scan(&[0.0, 1.0], &[0.0, 0.5], &mesh).unwrap();
        assert_eq!(cells.len(), 4);
        let mut buf = Vec::new();
        write_region_csv(&cells, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "p,r,verdict_ab,verdict_ba,label");
        assert_eq!(lines.next().unwrap(), "0,0,UNSTEERABLE,UNSTEERABLE,SEPARABLE");
        assert_eq!(lines.next().unwrap(), "1,0,STEERABLE,STEERABLE,TWO_WAY_STEERABLE");
    }
}
