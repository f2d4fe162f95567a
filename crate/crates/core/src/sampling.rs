//! Sample-set generation and the sampling-versus-weighting equivalence check.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::features::{dot, FeatureDictionary};
use crate::mdp::{Distribution, TabularMdp};
use crate::ralp::{Sample, SampleSet, Weights};
use crate::rng::{derive_seed, rng_from_seed};

/// How an action is picked once a state is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ActionRule {
    #[default]
    UniformAllowed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub state_dist: Distribution,
    pub n: usize,
    pub action_rule: ActionRule,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(state_dist: Distribution, n: usize, seed: u64) -> Self {
        Self {
            state_dist,
            n,
            action_rule: ActionRule::UniformAllowed,
            seed,
        }
    }
}

/// `n` i.i.d. samples: state from the plan's distribution, action uniform over
/// the allowed set, reward `R(s)` and a successor drawn from `P(·|s,a)`.
pub fn draw_samples(mdp: &TabularMdp, plan: &SamplingPlan) -> Result<SampleSet> {
    if plan.n == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    if plan.state_dist.len() != mdp.n_states() {
        return Err(Error::Dimension {
            what: "sampling distribution",
            expected: mdp.n_states(),
            got: plan.state_dist.len(),
        });
    }
    let states = WeightedIndex::new(plan.state_dist.mass())
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let allowed: Vec<Vec<usize>> = (0..mdp.n_states()).map(|s| mdp.allowed_actions(s).collect()).collect();
    let mut rng = rng_from_seed(plan.seed);
    let mut out = Vec::with_capacity(plan.n);
    for _ in 0..plan.n {
        let s = states.sample(&mut rng);
        let a = match plan.action_rule {
            ActionRule::UniformAllowed => allowed[s][rng.gen_range(0..allowed[s].len())],
        };
        let succ = mdp.successors(s, a);
        let next_state = if succ.len() == 1 {
            succ[0].0
        } else {
            let idx = WeightedIndex::new(succ.iter().map(|&(_, p)| p))
                .map_err(|e| Error::InvalidMdp(e.to_string()))?;
            succ[idx.sample(&mut rng)].0
        };
        out.push(Sample {
            state: s,
            action: a,
            reward: mdp.reward(s),
            next_state,
        });
    }
    Ok(SampleSet::new(out))
}

/// One sample per allowed `(s, a)`, in state-then-action order.
///
/// The successor is the most likely next state (the first one on ties), which
/// is exact for deterministic MDPs.
pub fn exhaustive_samples(mdp: &TabularMdp) -> SampleSet {
    let mut out = Vec::with_capacity(mdp.n_allowed_pairs());
    for s in 0..mdp.n_states() {
        for a in mdp.allowed_actions(s) {
            let next_state = mdp
                .successors(s, a)
                .iter()
                .fold((usize::MAX, f64::NEG_INFINITY), |best, &(n, p)| if p > best.1 { (n, p) } else { best })
                .0;
            out.push(Sample {
                state: s,
                action: a,
                reward: mdp.reward(s),
                next_state,
            });
        }
    }
    SampleSet::new(out)
}

/// Monte Carlo estimates of `Σ_s μ(s)Φ(s)w` by two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation1Estimate {
    /// Uniform draws, each weighted by `μ(s)·|S|`.
    pub uniform_weighted: f64,
    pub uniform_weighted_se: f64,
    /// Draws from `μ`, each weighted by 1.
    pub mu_sampled: f64,
    pub mu_sampled_se: f64,
    /// The exact value on the finite state space.
    pub exact: f64,
}

impl Observation1Estimate {
    /// Whether both means lie within `k` standard errors of the exact value.
    pub fn within(&self, k: f64) -> bool {
        (self.uniform_weighted - self.exact).abs() <= k * self.uniform_weighted_se
            && (self.mu_sampled - self.exact).abs() <= k * self.mu_sampled_se
    }
}

/// Compares uniform sampling with `μ`-weighted objective terms against
/// `μ`-sampling with unit weights, over `trials` sample sets of size `n`.
///
/// Trial `t` draws its uniform set from seed `derive(seed, 2t)` and its
/// `μ` set from `derive(seed, 2t + 1)`.
pub fn observation1_check(
    mdp: &TabularMdp,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    mu: &Distribution,
    w: &Weights,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Observation1Estimate> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("n and trials must be positive".into()));
    }
    if mu.len() != mdp.n_states() || coords.len() != mdp.n_states() {
        return Err(Error::Dimension {
            what: "distribution / coordinates",
            expected: mdp.n_states(),
            got: mu.len().min(coords.len()),
        });
    }
    let values: Vec<f64> = coords.iter().map(|c| dot(&dict.row(c), &w.w)).collect();
    let exact: f64 = mu.mass().iter().zip(&values).map(|(m, v)| m * v).sum();
    let n_states = mdp.n_states() as f64;
    let uniform = Distribution::uniform(mdp.n_states());

    let mut uni = Vec::with_capacity(trials);
    let mut musamp = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let su = draw_samples(mdp, &SamplingPlan::new(uniform.clone(), n, derive_seed(seed, 2 * t)))?;
        let sm = draw_samples(mdp, &SamplingPlan::new(mu.clone(), n, derive_seed(seed, 2 * t + 1)))?;
        uni.push(
            su.samples().iter().map(|s| mu.mass()[s.state] * n_states * values[s.state]).sum::<f64>() / n as f64,
        );
        musamp.push(sm.samples().iter().map(|s| values[s.state]).sum::<f64>() / n as f64);
    }
    let (uniform_weighted, uniform_weighted_se) = mean_and_se(&uni);
    let (mu_sampled, mu_sampled_se) = mean_and_se(&musamp);
    Ok(Observation1Estimate {
        uniform_weighted,
        uniform_weighted_se,
        mu_sampled,
        mu_sampled_se,
        exact,
    })
}

fn mean_and_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
