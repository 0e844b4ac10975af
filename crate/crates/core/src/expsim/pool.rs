use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::qmat::{psi_plus_projector, ComplexMatrix, DensityMatrix};
use crate::{Error, Result};

/// The six single-party tomography outcomes, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    X0,
    X1,
    Y0,
    Y1,
    Z0,
    Z1,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::X0,
        Outcome::X1,
        Outcome::Y0,
        Outcome::Y1,
        Outcome::Z0,
        Outcome::Z1,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Pauli axis: 0 = x, 1 = y, 2 = z.
    pub fn axis(self) -> usize {
        self.index() / 2
    }

    /// Eigenvalue of the axis Pauli operator.
    pub fn sign(self) -> f64 {
        if self.index() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn token(self) -> &'static str {
        ["X0", "X1", "Y0", "Y1", "Z0", "Z1"][self.index()]
    }

    pub fn ket(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let re = |x| Complex64::new(x, 0.0);
        match self {
            Outcome::X0 => [re(h), re(h)],
            Outcome::X1 => [re(h), re(-h)],
            Outcome::Y0 => [re(h), Complex64::new(0.0, h)],
            Outcome::Y1 => [re(h), Complex64::new(0.0, -h)],
            Outcome::Z0 => [re(1.0), re(0.0)],
            Outcome::Z1 => [re(0.0), re(1.0)],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ket())
    }
}

impl std::str::FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.token() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown outcome token {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FrameKind {
    Entangled,
    PurePart,
    Isotropic,
}

impl FrameKind {
    pub fn flux(self) -> f64 {
        match self {
            FrameKind::Entangled | FrameKind::PurePart => 1.0,
            FrameKind::Isotropic => 0.5,
        }
    }

    fn slot(self) -> usize {
        match self {
            FrameKind::Entangled => 0,
            FrameKind::PurePart => 1,
            FrameKind::Isotropic => 2,
        }
    }
}

/// One hologram. Product frames carry the pure states they imprint on each
/// side; the entangled frame leaves the source state untouched.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub kind: FrameKind,
    pub alice: Option<Outcome>,
    pub bob: Option<Outcome>,
    pub flux: f64,
}

impl Frame {
    pub fn state(&self) -> ComplexMatrix {
        match (self.alice, self.bob) {
            (Some(a), Some(b)) => a.projector().kron(&b.projector()),
            _ => psi_plus_projector(),
        }
    }
}

/// The 43 holograms: index 0 entangled, 1..=6 `|0⟩ ⊗ outcome`, 7..=42 all
/// outcome products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HologramPool {
    pub frames: Vec<Frame>,
}

pub const POOL_SIZE: usize = 43;

impl HologramPool {
    pub fn standard() -> Self {
        let mut frames = Vec::with_capacity(POOL_SIZE);
        frames.push(Frame {
            kind: FrameKind::Entangled,
            alice: None,
            bob: None,
            flux: FrameKind::Entangled.flux(),
        });
        for b in Outcome::ALL {
            frames.push(Frame {
                kind: FrameKind::PurePart,
                alice: Some(Outcome::Z0),
                bob: Some(b),
                flux: FrameKind::PurePart.flux(),
            });
        }
        for a in Outcome::ALL {
            for b in Outcome::ALL {
                frames.push(Frame {
                    kind: FrameKind::Isotropic,
                    alice: Some(a),
                    bob: Some(b),
                    flux: FrameKind::Isotropic.flux(),
                });
            }
        }
        Self { frames }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

impl Default for HologramPool {
    fn default() -> Self {
        Self::standard()
    }
}

/// Per-frame selection probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerProbabilities {
    pub p_e: f64,
    /// Each of the six pure-part frames.
    pub p_s: f64,
    /// Each of the 36 isotropic frames.
    pub p_i: f64,
    /// Probability of the pure part given a product frame, `r/(2-r)`.
    pub eta_hat: f64,
}

impl SamplerProbabilities {
    /// Class masses `(p_e, 6 p_s, 36 p_i)`.
    pub fn class_masses(&self) -> [f64; 3] {
        [self.p_e, 6.0 * self.p_s, 36.0 * self.p_i]
    }

    pub fn frame_probability(&self, index: usize) -> f64 {
        match index {
            0 => self.p_e,
            1..=6 => self.p_s,
            _ => self.p_i,
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!("{name} = {v} not in [0, 1]")))
    }
}

pub fn sampler_probabilities(p: f64, r: f64) -> Result<SamplerProbabilities> {
    check_unit("p", p)?;
    check_unit("r", r)?;
    let p_e = p / ((1.0 - p) * (2.0 - r) + p);
    let p_p = 1.0 - p_e;
    let eta_hat = r / (2.0 - r);
    Ok(SamplerProbabilities {
        p_e,
        p_s: eta_hat * p_p / 6.0,
        p_i: (1.0 - eta_hat) * p_p / 36.0,
        eta_hat,
    })
}

/// Animation parameters. `accumulation_s` is the total coincidence window,
/// split evenly over the 36 joint outcome settings; the animation loops.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub p_ipt: f64,
    pub r_ipt: f64,
    pub alpha: f64,
    pub frames: usize,
    pub exposure_s: f64,
    pub accumulation_s: f64,
    pub seed: u64,
}

pub const DEFAULT_ALPHA: f64 = 1.106;
pub const DEFAULT_FRAMES: usize = 800;

impl SamplerConfig {
    pub fn new(p_ipt: f64, r_ipt: f64) -> Self {
        Self {
            p_ipt,
            r_ipt,
            alpha: DEFAULT_ALPHA,
            frames: DEFAULT_FRAMES,
            exposure_s: 0.02,
            accumulation_s: 20.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("p_ipt", self.p_ipt)?;
        check_unit("r_ipt", self.r_ipt)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::ParamOutOfRange(format!("alpha = {} must be > 0", self.alpha)));
        }
        if self.frames == 0 {
            return Err(Error::EmptyAnimation);
        }
        if !(self.exposure_s > 0.0) || !(self.accumulation_s > 0.0) {
            return Err(Error::ParamOutOfRange("exposure and accumulation must be > 0".into()));
        }
        Ok(())
    }

    /// Parameters the imbalance is expected to produce:
    /// `(min(α p, 1), min(r / α, 1))`.
    pub fn configured(&self) -> (f64, f64) {
        ((self.alpha * self.p_ipt).min(1.0), (self.r_ipt / self.alpha).min(1.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnimationSpec {
    pub frame_indices: Vec<u8>,
}

impl AnimationSpec {
    pub fn len(&self) -> usize {
        self.frame_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_indices.is_empty()
    }

    /// Frame counts per class: entangled, pure part, isotropic.
    pub fn class_counts(&self, pool: &HologramPool) -> [usize; 3] {
        let mut c = [0; 3];
        for &i in &self.frame_indices {
            c[pool.frames[i as usize].kind.slot()] += 1;
        }
        c
    }

    pub fn class_frequencies(&self, pool: &HologramPool) -> [f64; 3] {
        let n = self.len().max(1) as f64;
        self.class_counts(pool).map(|c| c as f64 / n)
    }

    pub fn frame_histogram(&self, pool_len: usize) -> Vec<usize> {
        let mut h = vec![0; pool_len];
        for &i in &self.frame_indices {
            h[i as usize] += 1;
        }
        h
    }
}

/// Uniform draws from stream `stream` of the run's generator.
fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws the frame sequence with four independent generators: class,
/// pure/isotropic split, pure-part index, isotropic index.
pub fn sample_animation(cfg: &SamplerConfig) -> Result<AnimationSpec> {
    cfg.validate()?;
    let probs = sampler_probabilities(cfg.p_ipt, cfg.r_ipt)?;
    let mut l1 = stream(cfg.seed, 0);
    let mut l2 = stream(cfg.seed, 1);
    let mut l3 = stream(cfg.seed, 2);
    let mut l4 = stream(cfg.seed, 3);
    let frame_indices = (0..cfg.frames)
        .map(|_| {
            if l1.random::<f64>() <= probs.p_e {
                0u8
            } else if l2.random::<f64>() <= probs.eta_hat {
                1 + (6.0 * l3.random::<f64>()).floor().min(5.0) as u8
            } else {
                7 + (36.0 * l4.random::<f64>()).floor().min(35.0) as u8
            }
        })
        .collect();
    Ok(AnimationSpec { frame_indices })
}

/// Flux-weighted average `Σ w_f φ_f ρ_f / Σ w_f φ_f` over frames with
/// weights `w_f`.
fn flux_average(pool: &HologramPool, weights: &[f64]) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::zeros(4);
    let mut norm = 0.0;
    for (f, &w) in pool.frames.iter().zip(weights) {
        if w > 0.0 {
            acc = &acc + &f.state().scale(w * f.flux);
            norm += w * f.flux;
        }
    }
    if !(norm > 0.0) {
        return Err(Error::EmptyAnimation);
    }
    Ok(acc.scale(1.0 / norm))
}

/// The state an infinitely long animation with exact selection
/// probabilities produces.
pub fn effective_state(p: f64, r: f64) -> Result<DensityMatrix> {
    let probs = sampler_probabilities(p, r)?;
    let pool = HologramPool::standard();
    let w: Vec<f64> = (0..pool.len()).map(|i| probs.frame_probability(i)).collect();
    DensityMatrix::new(flux_average(&pool, &w)?)
}

/// The state a concrete animation produces (no imbalance).
pub fn effective_state_of(animation: &AnimationSpec, pool: &HologramPool) -> Result<DensityMatrix> {
    effective_state_weighted(animation, pool, [1.0; 3])
}

/// As [`effective_state_of`] with per-class photon-rate multipliers
/// `(entangled, pure part, isotropic)`.
pub fn effective_state_weighted(
    animation: &AnimationSpec,
    pool: &HologramPool,
    class_weights: [f64; 3],
) -> Result<DensityMatrix> {
    if animation.is_empty() {
        return Err(Error::EmptyAnimation);
    }
    let w: Vec<f64> = animation
        .frame_histogram(pool.len())
        .iter()
        .zip(&pool.frames)
        .map(|(&n, f)| n as f64 * class_weights[f.kind.slot()])
        .collect();
    DensityMatrix::new(flux_average(pool, &w)?)
}

/// How the generation imbalance `α` enters the photon rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImbalanceModel {
    /// Per-class multipliers chosen so that exact sampling yields
    /// `family_state(α p, r / α)`, clipped to the state space.
    #[default]
    Calibrated,
    /// Only entangled-frame photons are multiplied by `α`.
    EntangledRate,
}

impl ImbalanceModel {
    /// Multipliers `(entangled, pure part, isotropic)` for a configuration.
    pub fn class_weights(self, p: f64, r: f64, alpha: f64) -> [f64; 3] {
        match self {
            ImbalanceModel::EntangledRate => [alpha, 1.0, 1.0],
            ImbalanceModel::Calibrated => {
                if alpha * p >= 1.0 {
                    return [1.0, 0.0, 0.0];
                }
                let w_e = alpha * alpha * (1.0 - p) / (1.0 - alpha * p);
                let w_i = if r >= 1.0 {
                    1.0
                } else {
                    ((alpha - r) / (1.0 - r)).max(0.0)
                };
                [w_e, 1.0, w_i]
            }
        }
    }
}
