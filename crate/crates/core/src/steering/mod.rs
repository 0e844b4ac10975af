//! Steering certification: direction meshes and their shrinking factors,
//! assemblages, the LHS feasibility LP, verified steering certificates,
//! critical-radius brackets and hierarchy classification.
//!
//! Everything here concerns projective measurements on the steering side.

mod assemblage;
mod bracket;
mod certificate;
mod classify;
mod lhs;
mod mesh;

pub use assemblage::{assemblage, projector, Assemblage, COMPLETENESS_TOL};
pub use bracket::{
    critical_radius_bracket, critical_radius_bracket_with, oriented, probe, probe_assemblage,
    BracketSummary, Direction, Probe, RadiusBracket, DEFAULT_BISECTION_STEPS,
};
pub use certificate::{
    certificate_from_dual, steering_certificate, steering_certificate_with, SteeringCertificate,
    MIN_MARGIN,
};
pub use classify::{
    classify, classify_with, region_scan, region_scan_with, unit_grid, write_region_csv,
    DirectionEvidence, DirectionVerdict, HierarchyLabel, RegionCell, Verdict,
};
pub use lhs::{
    lhs_feasible, lhs_feasible_with, FarkasDual, LhsColumn, LhsModel, LhsOutcome, LpSettings,
};
pub use mesh::{
    fibonacci_mesh, icosahedral_mesh, octahedral_mesh, shrinking_factor, DirectionMesh,
    MAX_DIRECTIONS, MIN_DIRECTIONS,
};
