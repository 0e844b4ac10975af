//! Simulation of the hologram-animation experiment: frame pool and
//! sampler, photon-rate imbalance, Poisson coincidence counts,
//! over-complete tomography with physical projection, bootstrap errors,
//! and the end-to-end report.

mod counts;
mod experiment;
mod pool;
mod tomo;

pub use counts::{
    expected_counts, outcome_probabilities, simulate_counts, CountsSidecar, CountsTable,
    DetectorConfig,
};
pub use experiment::{
    run_experiment, ExperimentOptions, ExperimentReport, LpSettingsSpec, ResampleBrackets,
    OPERATING_POINTS,
};
pub use pool::{
    effective_state, effective_state_of, effective_state_weighted, sample_animation,
    sampler_probabilities, AnimationSpec, Frame, FrameKind, HologramPool, ImbalanceModel, Outcome,
    SamplerConfig, SamplerProbabilities, DEFAULT_ALPHA, DEFAULT_FRAMES, POOL_SIZE,
};
pub use tomo::{
    analyze_counts, bootstrap, project_to_physical, reconstruct, tomo_from_weights,
    tomo_linear_inversion, BootstrapResult, TomographyResult, DEFAULT_VARIATIONS,
};
