use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::counts::{simulate_counts, CountsTable, DetectorConfig};
use super::pool::{
    effective_state_weighted, sample_animation, HologramPool, ImbalanceModel, SamplerConfig,
};
use super::tomo::{analyze_counts, bootstrap, reconstruct, TomographyResult, DEFAULT_VARIATIONS};
use crate::qmat::DensityMatrixJson;
use crate::states::{FamilyParams, RetrievedParams};
use crate::steering::{
    classify_with, critical_radius_bracket_with, BracketSummary, Direction, DirectionMesh,
    LpSettings, Verdict, DEFAULT_BISECTION_STEPS,
};
use crate::Result;

/// Ten `(p_ipt, r_ipt)` operating points inside the one-way band, used for
/// batch runs.
pub const OPERATING_POINTS: [(f64, f64); 10] = [
    (0.36875, 0.95),
    (0.38125, 0.95),
    (0.3875, 0.95),
    (0.375, 0.925),
    (0.39375, 0.925),
    (0.4, 0.925),
    (0.38125, 0.9),
    (0.3875, 0.9),
    (0.39375, 0.9),
    (0.4, 0.875),
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentOptions {
    pub detector: DetectorConfig,
    pub imbalance: ImbalanceModel,
    pub variations: usize,
    pub bisection_steps: usize,
    /// Also bracket both directions for every bootstrap resample.
    pub resample_brackets: bool,
    pub lp: LpSettingsSpec,
}

/// Serializable subset of [`LpSettings`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LpSettingsSpec {
    pub feasibility_tol: f64,
    pub max_iterations: usize,
}

impl LpSettingsSpec {
    pub fn settings(&self) -> LpSettings {
        LpSettings {
            feasibility_tol: self.feasibility_tol,
            max_iterations: self.max_iterations,
            ..LpSettings::default()
        }
    }
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            imbalance: ImbalanceModel::default(),
            variations: DEFAULT_VARIATIONS,
            bisection_steps: DEFAULT_BISECTION_STEPS,
            resample_brackets: false,
            lp: LpSettingsSpec {
                feasibility_tol: LpSettings::default().feasibility_tol,
                max_iterations: LpSettings::default().max_iterations,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResampleBrackets {
    pub params: RetrievedParams,
    pub ab: BracketSummary,
    pub ba: BracketSummary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: SamplerConfig,
    pub options: ExperimentOptions,
    pub p_cfg: f64,
    pub r_cfg: f64,
    /// Empirical frame fractions: entangled, pure part, isotropic.
    pub class_frequencies: [f64; 3],
    pub effective_state: DensityMatrixJson,
    pub counts: CountsTable,
    pub tomography: TomographyResult,
    pub bracket_ab: BracketSummary,
    pub bracket_ba: BracketSummary,
    pub verdict: Verdict,
    pub resample_brackets: Vec<ResampleBrackets>,
}

/// Animation → counts → tomography → bootstrap → brackets and verdict.
pub fn run_experiment(
    cfg: &SamplerConfig,
    mesh: &DirectionMesh,
    opts: &ExperimentOptions,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = HologramPool::standard();
    let animation = sample_animation(cfg)?;
    let weights = opts.imbalance.class_weights(cfg.p_ipt, cfg.r_ipt, cfg.alpha);
    let source = effective_state_weighted(&animation, &pool, weights)?;
    let counts = simulate_counts(&source, &opts.detector, cfg.accumulation_s, cfg.seed)?;

    let (p_cfg, r_cfg) = cfg.configured();
    let target = FamilyParams::new(p_cfg, r_cfg)?;
    let (rho_hat, tomography) = analyze_counts(&counts, Some(target), opts.variations, cfg.seed)?;

    let lp = opts.lp.settings();
    let m = rho_hat.matrix();
    let (ab, ba) = rayon::join(
        || critical_radius_bracket_with(m, Direction::AtoB, mesh, opts.bisection_steps, &lp),
        || critical_radius_bracket_with(m, Direction::BtoA, mesh, opts.bisection_steps, &lp),
    );
    let verdict = classify_with(&rho_hat, mesh, &lp)?;

    let resample_brackets = if opts.resample_brackets {
        let boot = bootstrap(&counts, opts.variations, cfg.seed)?;
        boot.tables
            .par_iter()
            .map(|t| {
                let (rho, params) = reconstruct(t)?;
                let m = rho.matrix();
                let ab = critical_radius_bracket_with(m, Direction::AtoB, mesh, opts.bisection_steps, &lp)?;
                let ba = critical_radius_bracket_with(m, Direction::BtoA, mesh, opts.bisection_steps, &lp)?;
                Ok(ResampleBrackets {
                    params,
                    ab: ab.summary(),
                    ba: ba.summary(),
                })
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    Ok(ExperimentReport {
        config: cfg.clone(),
        options: opts.clone(),
        p_cfg,
        r_cfg,
        class_frequencies: animation.class_frequencies(&pool),
        effective_state: source.to_json(),
        counts,
        tomography,
        bracket_ab: ab?.summary(),
        bracket_ba: ba?.summary(),
        verdict,
        resample_brackets,
    })
}
