//! Monte Carlo comparisons on the room domain.
//!
//! Each comparison runs two sides, A and B, for the same number of trials.
//! A trial draws samples, builds Gaussian features centred on the sampled
//! states, solves the RALP and records `|V*(s) − Φ(s)w̃|` at every state. The
//! per-state means are reported for each side along with `mean_A − mean_B`.
//!
//! Trial `i` of both sides draws from the seed `derive_seed(seed, i)`, so the
//! two sides see common random numbers and the difference map has lower
//! variance than independent draws would give.

mod config;
mod output;

use std::ops::Range;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::build_dictionary;
use crate::mdp::{complement_distribution, greedy_policy, optimal_values, visitation_distribution, Distribution};
use crate::ralp::{approximate_values, solve_ralp, RalpConfig, Relevance};
use crate::rng::derive_seed;
use crate::room::{build_room_domain, RoomDomain, Variant};
use crate::sampling::{draw_samples, exhaustive_samples, SamplingPlan};

pub use config::{
    DistKind, ExperimentConfig, Panel, Side, SideConfig, ZetaConfig, DEFAULT_SEED, DESK_TRIALS, PAPER_TRIALS,
};
pub use output::{emit_outputs, heatmap_pgm, map_csv, Manifest};

/// Attempts per trial before an LP failure is propagated.
pub const MAX_REDRAWS: u64 = 16;

/// Cached per-variant data: the domain, `V*` and ζ.
#[derive(Debug, Clone)]
pub struct VariantData {
    pub domain: RoomDomain,
    pub coords: Vec<[f64; 2]>,
    pub v_star: Vec<f64>,
    pub zeta: Distribution,
    pub one_minus_zeta: Distribution,
}

impl VariantData {
    pub fn new(variant: Variant, zeta_cfg: &ZetaConfig) -> Result<Self> {
        let domain = build_room_domain(variant);
        let v_star = optimal_values(&domain.mdp)?;
        let policy = greedy_policy(&domain.mdp, &v_star)?;
        let zeta = visitation_distribution(
            &domain.mdp,
            &policy,
            zeta_cfg.episodes,
            zeta_cfg.horizon,
            &Distribution::uniform(domain.n_states()),
            zeta_cfg.seed,
        )?;
        let one_minus_zeta = complement_distribution(&zeta)?;
        Ok(Self {
            coords: domain.feature_coords(),
            domain,
            v_star: v_star.into_inner(),
            zeta,
            one_minus_zeta,
        })
    }

    pub fn distribution(&self, kind: DistKind) -> Distribution {
        match kind {
            DistKind::Uniform => Distribution::uniform(self.domain.n_states()),
            DistKind::Zeta => self.zeta.clone(),
            DistKind::OneMinusZeta => self.one_minus_zeta.clone(),
        }
    }
}

/// Both room variants, built once and shared by every trial.
#[derive(Debug, Clone)]
pub struct ExperimentContext {
    pub free: VariantData,
    pub stable: VariantData,
}

impl ExperimentContext {
    pub fn new(zeta_cfg: &ZetaConfig) -> Result<Self> {
        Ok(Self {
            free: VariantData::new(Variant::Free, zeta_cfg)?,
            stable: VariantData::new(Variant::Stable, zeta_cfg)?,
        })
    }

    pub fn variant(&self, v: Variant) -> &VariantData {
        match v {
            Variant::Free => &self.free,
            Variant::Stable => &self.stable,
        }
    }
}

/// Per-state absolute errors of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub errors: Vec<f64>,
    /// Failed LP attempts that were re-drawn.
    pub redraws: u64,
}

/// Runs trial `trial` of `side`.
pub fn run_trial(ctx: &ExperimentContext, cfg: &ExperimentConfig, side: Side, trial: u64) -> Result<TrialOutcome> {
    let sc = cfg.side(side);
    let data = ctx.variant(sc.variant);
    let sampling = data.distribution(sc.sampling);
    let rho = match sc.rho {
        DistKind::Uniform => Relevance::Ones,
        kind => Relevance::PerState(data.distribution(kind).mass().to_vec()),
    };
    let mut ralp_cfg = RalpConfig::new(cfg.psi, data.domain.mdp.gamma()).with_rho(rho);
    if cfg.exhaustive {
        ralp_cfg = ralp_cfg.with_generation(256);
    }
    let all_states: Vec<usize> = (0..data.domain.n_states()).collect();
    let base = derive_seed(cfg.seed, trial);

    let mut last_err = None;
    for attempt in 0..MAX_REDRAWS {
        let seed = if attempt == 0 { base } else { derive_seed(base, attempt) };
        let samples = if cfg.exhaustive {
            exhaustive_samples(&data.domain.mdp)
        } else {
            draw_samples(&data.domain.mdp, &SamplingPlan::new(sampling.clone(), cfg.n_samples, seed))?
        };
        let mut centers_idx = samples.states();
        centers_idx.sort_unstable();
        centers_idx.dedup();
        let centers: Vec<[f64; 2]> = centers_idx.iter().map(|&s| data.coords[s]).collect();
        let dict = build_dictionary(&centers, &cfg.variances, cfg.normalization, &data.coords)?;
        match solve_ralp(&samples, &dict, &data.coords, &ralp_cfg) {
            Ok(w) => {
                let approx = approximate_values(&dict, &w, &data.coords, &all_states)?;
                let errors = data.v_star.iter().zip(approx.iter()).map(|(v, a)| (v - a).abs()).collect();
                return Ok(TrialOutcome {
                    errors,
                    redraws: attempt,
                });
            }
            Err(e) => {
                warn!("side {side:?} trial {trial} attempt {attempt}: {e}; redrawing");
                if cfg.exhaustive {
                    return Err(e);
                }
                last_err = Some(e);
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Exact, order-independent per-state sums of absolute errors.
///
/// Values are accumulated in 2⁻⁶⁴ fixed point, so merging partial sums in
/// any order yields bit-identical means.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorAccumulator {
    sums: Vec<i128>,
    trials: usize,
}

const FIXED_SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

impl ErrorAccumulator {
    pub fn new(n_states: usize) -> Self {
        Self {
            sums: vec![0; n_states],
            trials: 0,
        }
    }

    pub fn add(&mut self, errors: &[f64]) -> Result<()> {
        if errors.len() != self.sums.len() {
            return Err(Error::Dimension {
                what: "error map",
                expected: self.sums.len(),
                got: errors.len(),
            });
        }
        for (acc, &e) in self.sums.iter_mut().zip(errors) {
            if !(e.is_finite() && (0.0..1e15).contains(&e)) {
                return Err(Error::InvalidArgument(format!("error value {e} out of range")));
            }
            *acc += (e * FIXED_SCALE).round() as i128;
        }
        self.trials += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &ErrorAccumulator) -> Result<()> {
        if other.sums.len() != self.sums.len() {
            return Err(Error::Dimension {
                what: "error map",
                expected: self.sums.len(),
                got: other.sums.len(),
            });
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.trials += other.trials;
        Ok(())
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn finish(&self) -> ErrorMap {
        let t = self.trials.max(1) as f64;
        ErrorMap {
            mean_abs_error: self.sums.iter().map(|&s| s as f64 / FIXED_SCALE / t).collect(),
            trials_used: self.trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorMap {
    pub mean_abs_error: Vec<f64>,
    pub trials_used: usize,
}

impl ErrorMap {
    pub fn grid_mean(&self) -> f64 {
        self.mean_abs_error.iter().sum::<f64>() / self.mean_abs_error.len() as f64
    }

    pub fn weighted_mean(&self, d: &Distribution) -> f64 {
        self.mean_abs_error.iter().zip(d.mass()).map(|(e, m)| e * m).sum()
    }
}

/// Accumulated errors of one side over a trial range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideRun {
    pub errors: ErrorAccumulator,
    pub redraws: u64,
}

/// Runs the trials in `range` for `side`, in parallel.
pub fn run_side(ctx: &ExperimentContext, cfg: &ExperimentConfig, side: Side, range: Range<u64>) -> Result<SideRun> {
    let outcomes: Vec<TrialOutcome> = range
        .into_par_iter()
        .map(|t| run_trial(ctx, cfg, side, t))
        .collect::<Result<_>>()?;
    let n_states = ctx.variant(cfg.side(side).variant).domain.n_states();
    let mut errors = ErrorAccumulator::new(n_states);
    let mut redraws = 0;
    for o in &outcomes {
        errors.add(&o.errors)?;
        redraws += o.redraws;
    }
    Ok(SideRun { errors, redraws })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub map_a: ErrorMap,
    pub map_b: ErrorMap,
    /// `mean_A(s) − mean_B(s)`.
    pub diff: Vec<f64>,
    pub redraws_a: u64,
    pub redraws_b: u64,
}

/// Runs both sides of `cfg`, building the shared context first.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let ctx = ExperimentContext::new(&cfg.zeta)?;
    run_experiment_with(&ctx, cfg)
}

/// Runs both sides of `cfg` against a prebuilt context.
pub fn run_experiment_with(ctx: &ExperimentContext, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let range = 0..cfg.trials as u64;
    let a = run_side(ctx, cfg, Side::A, range.clone())?;
    let b = run_side(ctx, cfg, Side::B, range)?;
    let (map_a, map_b) = (a.errors.finish(), b.errors.finish());
    let diff = map_a.mean_abs_error.iter().zip(&map_b.mean_abs_error).map(|(x, y)| x - y).collect();
    Ok(ExperimentResult {
        config: cfg.clone(),
        map_a,
        map_b,
        diff,
        redraws_a: a.redraws,
        redraws_b: b.redraws,
    })
}

/// Scalar digests of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanelSummary {
    pub grid_mean_a: f64,
    pub grid_mean_b: f64,
    pub mean_diff: f64,
    /// ζ of side B's variant.
    pub zeta_weighted_a: f64,
    pub zeta_weighted_b: f64,
    /// Share of states off the equidistant ridge with `diff > 0`.
    pub positive_off_ridge: f64,
    pub redraws: u64,
}

impl ExperimentResult {
    pub fn summary(&self, ctx: &ExperimentContext) -> PanelSummary {
        let data = ctx.variant(self.config.side_b.variant);
        let (mut off, mut pos) = (0usize, 0usize);
        for (s, d) in self.diff.iter().enumerate() {
            if !data.domain.on_ridge(s) {
                off += 1;
                pos += usize::from(*d > 0.0);
            }
        }
        PanelSummary {
            grid_mean_a: self.map_a.grid_mean(),
            grid_mean_b: self.map_b.grid_mean(),
            mean_diff: self.diff.iter().sum::<f64>() / self.diff.len() as f64,
            zeta_weighted_a: self.map_a.weighted_mean(&data.zeta),
            zeta_weighted_b: self.map_b.weighted_mean(&data.zeta),
            positive_off_ridge: pos as f64 / off.max(1) as f64,
            redraws: self.redraws_a + self.redraws_b,
        }
    }
}
