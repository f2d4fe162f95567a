//! Finite tabular MDPs and the Bellman machinery built on them.
//!
//! Transitions are stored sparsely: each allowed `(s, a)` pair owns a list of
//! `(s', p)` entries with positive probability. Disallowed pairs have no
//! entries and are skipped by every operator.

mod format;

use std::ops::Deref;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub use format::{read_mdp, write_mdp};

/// Default stopping tolerance on `‖TV − V‖_∞` for [`value_iteration`].
pub const DEFAULT_VI_TOL: f64 = 1e-9;
/// Default sweep cap for [`value_iteration`].
pub const DEFAULT_VI_MAX_ITER: usize = 100_000;
/// Backed-up values within this (relative) distance of the best are ties.
pub const GREEDY_TIE_TOL: f64 = 1e-10;

const ROW_SUM_TOL: f64 = 1e-12;
const DIST_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    n_states: usize,
    n_actions: usize,
    transitions: Vec<Vec<(usize, f64)>>,
    rewards: Vec<f64>,
    gamma: f64,
    allowed: Vec<bool>,
}

impl TabularMdp {
    /// Builds an MDP from sparse transition rows indexed by `s * n_actions + a`.
    ///
    /// Rows of disallowed pairs must be empty. Zero-probability entries are
    /// dropped and duplicate successors merged.
    pub fn new(
        n_states: usize,
        n_actions: usize,
        transitions: Vec<Vec<(usize, f64)>>,
        rewards: Vec<f64>,
        gamma: f64,
        allowed: Vec<bool>,
    ) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::InvalidMdp("need at least one state and one action".into()));
        }
        let pairs = n_states * n_actions;
        if transitions.len() != pairs {
            return Err(Error::Dimension {
                what: "transition rows",
                expected: pairs,
                got: transitions.len(),
            });
        }
        if allowed.len() != pairs {
            return Err(Error::Dimension {
                what: "action mask",
                expected: pairs,
                got: allowed.len(),
            });
        }
        if rewards.len() != n_states {
            return Err(Error::Dimension {
                what: "reward vector",
                expected: n_states,
                got: rewards.len(),
            });
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidMdp(format!("discount {gamma} outside [0, 1)")));
        }
        if let Some(s) = rewards.iter().position(|r| !r.is_finite()) {
            return Err(Error::InvalidMdp(format!("non-finite reward at state {s}")));
        }

        let mut clean = Vec::with_capacity(pairs);
        for (idx, row) in transitions.into_iter().enumerate() {
            let (s, a) = (idx / n_actions, idx % n_actions);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (next, p) in row {
                if next >= n_states {
                    return Err(Error::InvalidMdp(format!(
                        "successor {next} of ({s}, {a}) out of range"
                    )));
                }
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidMdp(format!(
                        "bad probability {p} for ({s}, {a}) -> {next}"
                    )));
                }
                if p == 0.0 {
                    continue;
                }
                match merged.iter_mut().find(|(n, _)| *n == next) {
                    Some(entry) => entry.1 += p,
                    None => merged.push((next, p)),
                }
            }
            merged.sort_by_key(|&(n, _)| n);
            if allowed[idx] {
                let total: f64 = merged.iter().map(|&(_, p)| p).sum();
                if (total - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidMdp(format!(
                        "transition row ({s}, {a}) sums to {total}"
                    )));
                }
            } else if !merged.is_empty() {
                return Err(Error::InvalidMdp(format!(
                    "disallowed pair ({s}, {a}) has transitions"
                )));
            }
            clean.push(merged);
        }
        for s in 0..n_states {
            if !(0..n_actions).any(|a| allowed[s * n_actions + a]) {
                return Err(Error::InvalidMdp(format!("state {s} has no allowed action")));
            }
        }

        Ok(Self {
            n_states,
            n_actions,
            transitions: clean,
            rewards,
            gamma,
            allowed,
        })
    }

    /// Builds an MDP from a dense `[s][a][s']` probability table. Pairs whose
    /// row is all zeros are treated as disallowed.
    pub fn from_dense(probs: &[Vec<Vec<f64>>], rewards: Vec<f64>, gamma: f64) -> Result<Self> {
        let n_states = probs.len();
        let n_actions = probs.first().map_or(0, Vec::len);
        let mut transitions = Vec::with_capacity(n_states * n_actions);
        let mut allowed = Vec::with_capacity(n_states * n_actions);
        for (s, per_action) in probs.iter().enumerate() {
            if per_action.len() != n_actions {
                return Err(Error::Dimension {
                    what: "actions in dense table",
                    expected: n_actions,
                    got: per_action.len(),
                });
            }
            for row in per_action {
                if row.len() != n_states {
                    return Err(Error::InvalidMdp(format!("dense row of state {s} has wrong length")));
                }
                let sparse: Vec<(usize, f64)> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p != 0.0)
                    .map(|(n, &p)| (n, p))
                    .collect();
                allowed.push(!sparse.is_empty());
                transitions.push(sparse);
            }
        }
        Self::new(n_states, n_actions, transitions, rewards, gamma, allowed)
    }

    /// Same structure, different rewards.
    pub fn with_rewards(&self, rewards: Vec<f64>) -> Result<Self> {
        Self::new(
            self.n_states,
            self.n_actions,
            self.transitions.clone(),
            rewards,
            self.gamma,
            self.allowed.clone(),
        )
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn reward(&self, s: usize) -> f64 {
        self.rewards[s]
    }

    pub fn is_allowed(&self, s: usize, a: usize) -> bool {
        self.allowed[s * self.n_actions + a]
    }

    pub fn allowed_actions(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_actions).filter(move |&a| self.is_allowed(s, a))
    }

    /// Number of allowed `(s, a)` pairs.
    pub fn n_allowed_pairs(&self) -> usize {
        self.allowed.iter().filter(|&&b| b).count()
    }

    /// Sparse successor distribution of `(s, a)`; empty when disallowed.
    pub fn successors(&self, s: usize, a: usize) -> &[(usize, f64)] {
        &self.transitions[s * self.n_actions + a]
    }

    pub fn transition_prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.successors(s, a)
            .iter()
            .find(|&&(n, _)| n == next)
            .map_or(0.0, |&(_, p)| p)
    }

    /// `Σ_{s'} p(s'|s,a) f(s')`.
    pub fn expectation(&self, s: usize, a: usize, f: &[f64]) -> f64 {
        self.successors(s, a).iter().map(|&(n, p)| p * f[n]).sum()
    }

    /// `R(s) + γ Σ_{s'} p(s'|s,a) V(s')` without mask or dimension checks.
    pub fn q_value(&self, s: usize, a: usize, v: &[f64]) -> f64 {
        self.rewards[s] + self.gamma * self.expectation(s, a, v)
    }

    /// Same transitions and mask, independent of rewards.
    pub fn same_structure(&self, other: &TabularMdp) -> bool {
        self.n_states == other.n_states
            && self.n_actions == other.n_actions
            && self.gamma == other.gamma
            && self.allowed == other.allowed
            && self.transitions == other.transitions
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n_states {
            return Err(Error::Dimension {
                what: "value vector",
                expected: self.n_states,
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// A value function over states.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at state {i}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `‖self − other‖_∞`.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        max_abs_diff(&self.0, other)
    }
}

impl Deref for ValueVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A stochastic policy, stored row-major as `action_prob[s * n_actions + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    n_actions: usize,
    action_prob: Vec<f64>,
}

impl Policy {
    pub fn new(mdp: &TabularMdp, action_prob: Vec<f64>) -> Result<Self> {
        let n_actions = mdp.n_actions();
        if action_prob.len() != mdp.n_states() * n_actions {
            return Err(Error::Dimension {
                what: "policy table",
                expected: mdp.n_states() * n_actions,
                got: action_prob.len(),
            });
        }
        for s in 0..mdp.n_states() {
            let row = &action_prob[s * n_actions..(s + 1) * n_actions];
            let mut total = 0.0;
            for (a, &p) in row.iter().enumerate() {
                if !(p >= 0.0) {
                    return Err(Error::InvalidArgument(format!("negative probability at ({s}, {a})")));
                }
                if p > 0.0 && !mdp.is_allowed(s, a) {
                    return Err(Error::InvalidArgument(format!(
                        "mass on disallowed action ({s}, {a})"
                    )));
                }
                total += p;
            }
            if (total - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidArgument(format!("policy row {s} sums to {total}")));
            }
        }
        Ok(Self {
            n_actions,
            action_prob,
        })
    }

    /// Deterministic policy from one action per state.
    pub fn deterministic(mdp: &TabularMdp, actions: &[usize]) -> Result<Self> {
        let mut table = vec![0.0; mdp.n_states() * mdp.n_actions()];
        for (s, &a) in actions.iter().enumerate() {
            if a < mdp.n_actions() {
                table[s * mdp.n_actions() + a] = 1.0;
            }
        }
        Self::new(mdp, table)
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.action_prob[s * self.n_actions + a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.action_prob[s * self.n_actions..(s + 1) * self.n_actions]
    }

    /// The action taken with probability one in `s`, if any.
    pub fn deterministic_action(&self, s: usize) -> Option<usize> {
        self.row(s).iter().position(|&p| p == 1.0)
    }
}

/// A probability distribution over states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(i) = mass.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("bad mass {} at {i}", mass[i])));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self(mass))
    }

    /// Normalises nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if let Some(i) = weights.iter().position(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("bad weight {} at {i}", weights[i])));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, s: usize) -> Self {
        let mut mass = vec![0.0; n];
        mass[s] = 1.0;
        Self(mass)
    }

    pub fn mass(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `T_a V` for a single action; `None` where `a` is not allowed.
pub fn bellman_action(mdp: &TabularMdp, v: &[f64], a: usize) -> Result<Vec<Option<f64>>> {
    mdp.check_len(v)?;
    if a >= mdp.n_actions() {
        return Err(Error::InvalidArgument(format!("action {a} out of range")));
    }
    Ok((0..mdp.n_states())
        .map(|s| mdp.is_allowed(s, a).then(|| mdp.q_value(s, a, v)))
        .collect())
}

/// `T V`: the pointwise max of `T_a V` over allowed actions.
pub fn bellman_max(mdp: &TabularMdp, v: &[f64]) -> Result<ValueVector> {
    mdp.check_len(v)?;
    Ok(ValueVector(bellman_max_unchecked(mdp, v)))
}

fn bellman_max_unchecked(mdp: &TabularMdp, v: &[f64]) -> Vec<f64> {
    (0..mdp.n_states())
        .map(|s| {
            mdp.allowed_actions(s)
                .map(|a| mdp.q_value(s, a, v))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Iterates `V ← TV` from zero until `‖TV − V‖_∞ ≤ tol`.
///
/// The returned vector is the last iterate, whose own residual is at most
/// `γ · tol`.
pub fn value_iteration(mdp: &TabularMdp, tol: f64, max_iter: usize) -> Result<ValueVector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut v = vec![0.0; mdp.n_states()];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = bellman_max_unchecked(mdp, &v);
        residual = max_abs_diff(&next, &v);
        v = next;
        if residual <= tol {
            return Ok(ValueVector(v));
        }
    }
    Err(Error::NotConverged {
        tol,
        max_iter,
        residual,
    })
}

/// [`value_iteration`] with the default tolerance and sweep cap.
pub fn optimal_values(mdp: &TabularMdp) -> Result<ValueVector> {
    value_iteration(mdp, DEFAULT_VI_TOL, DEFAULT_VI_MAX_ITER)
}

/// Deterministic greedy policy; near-ties go to the lowest action index.
pub fn greedy_policy(mdp: &TabularMdp, v: &[f64]) -> Result<Policy> {
    mdp.check_len(v)?;
    let actions: Vec<usize> = (0..mdp.n_states())
        .map(|s| greedy_action(mdp, v, s))
        .collect();
    Policy::deterministic(mdp, &actions)
}

pub(crate) fn greedy_action(mdp: &TabularMdp, v: &[f64], s: usize) -> usize {
    let q: Vec<(usize, f64)> = mdp.allowed_actions(s).map(|a| (a, mdp.q_value(s, a, v))).collect();
    let best = q.iter().map(|&(_, x)| x).fold(f64::NEG_INFINITY, f64::max);
    let slack = GREEDY_TIE_TOL * best.abs().max(1.0);
    q.iter()
        .find(|&&(_, x)| x >= best - slack)
        .map(|&(a, _)| a)
        .expect("every state has an allowed action")
}

/// Empirical state-occupancy frequencies of `policy`.
///
/// Each episode draws a start state from `start`, then takes `horizon`
/// steps; all `horizon + 1` occupied states (start included) are counted.
pub fn visitation_distribution(
    mdp: &TabularMdp,
    policy: &Policy,
    episodes: usize,
    horizon: usize,
    start: &Distribution,
    seed: u64,
) -> Result<Distribution> {
    if episodes == 0 || horizon == 0 {
        return Err(Error::InvalidArgument("episodes and horizon must be positive".into()));
    }
    if start.len() != mdp.n_states() {
        return Err(Error::Dimension {
            what: "start distribution",
            expected: mdp.n_states(),
            got: start.len(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let starts = WeightedIndex::new(start.mass())
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut counts = vec![0u64; mdp.n_states()];
    for _ in 0..episodes {
        let mut s = starts.sample(&mut rng);
        counts[s] += 1;
        for _ in 0..horizon {
            let a = match policy.deterministic_action(s) {
                Some(a) => a,
                None => draw_index(policy.row(s).iter().copied(), &mut rng),
            };
            let succ = mdp.successors(s, a);
            s = if succ.len() == 1 {
                succ[0].0
            } else {
                succ[draw_index(succ.iter().map(|&(_, p)| p), &mut rng)].0
            };
            counts[s] += 1;
        }
    }
    let total = (episodes * (horizon + 1)) as f64;
    Distribution::new(counts.iter().map(|&c| c as f64 / total).collect())
}

fn draw_index(weights: impl Iterator<Item = f64> + Clone, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            acc += w;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Order-reversing complement of a distribution.
///
/// Mass is `(1/n)(1 − d(s)/max d) + 1e-12`, renormalised, so the most
/// likely state of `d` becomes (nearly) the least likely and a uniform input
/// maps to a uniform output.
pub fn complement_distribution(d: &Distribution) -> Result<Distribution> {
    const FLOOR: f64 = 1e-12;
    let n = d.len() as f64;
    let peak = d.mass().iter().copied().fold(0.0, f64::max);
    let weights: Vec<f64> = d
        .mass()
        .iter()
        .map(|&m| (1.0 - m / peak).max(0.0) / n + FLOOR)
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::InvalidDistribution("complement is identically zero".into()));
    }
    Distribution::from_weights(&weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn self_loop(r: f64, gamma: f64) -> TabularMdp {
        TabularMdp::new(1, 1, vec![vec![(0, 1.0)]], vec![r], gamma, vec![true]).unwrap()
    }

    fn chain() -> TabularMdp {
        // s0 -> s1, s1 -> s1
        TabularMdp::new(
            2,
            1,
            vec![vec![(1, 1.0)], vec![(1, 1.0)]],
            vec![0.0, 1.0],
            0.5,
            vec![true, true],
        )
        .unwrap()
    }

    #[test]
    fn bellman_action_base_cases() {
        let m = self_loop(1.0, 0.95);
        assert_eq!(bellman_action(&m, &[0.0], 0).unwrap(), vec![Some(1.0)]);
        let fixed = bellman_action(&m, &[20.0], 0).unwrap()[0].unwrap();
        assert!((fixed - 20.0).abs() < 1e-12);
        let c = chain();
        assert_eq!(bellman_action(&c, &[0.0, 0.0], 0).unwrap(), vec![Some(0.0), Some(1.0)]);
    }

    #[test]
    fn bellman_action_flags_disallowed_and_checks_dims() {
        let m = TabularMdp::new(
            1,
            2,
            vec![vec![(0, 1.0)], vec![]],
            vec![1.0],
            0.9,
            vec![true, false],
        )
        .unwrap();
        assert_eq!(bellman_action(&m, &[0.0], 1).unwrap(), vec![None]);
        assert!(matches!(bellman_action(&m, &[0.0, 1.0], 0), Err(Error::Dimension { .. })));
    }

    #[test]
    fn bellman_max_singleton_and_symmetric_actions() {
        let c = chain();
        let tv = bellman_max(&c, &[3.0, 4.0]).unwrap();
        let ta = bellman_action(&c, &[3.0, 4.0], 0).unwrap();
        assert_eq!(tv.to_vec(), ta.into_iter().map(Option::unwrap).collect::<Vec<_>>());

        let twin = TabularMdp::new(
            2,
            2,
            vec![vec![(1, 1.0)], vec![(1, 1.0)], vec![(0, 1.0)], vec![(0, 1.0)]],
            vec![0.5, -1.0],
            0.9,
            vec![true; 4],
        )
        .unwrap();
        let v = [2.0, -3.0];
        let tv = bellman_max(&twin, &v).unwrap();
        let t0: Vec<f64> = bellman_action(&twin, &v, 0).unwrap().into_iter().flatten().collect();
        assert_eq!(tv.to_vec(), t0);
    }

    #[test]
    fn value_iteration_geometric_and_zero() {
        let v = value_iteration(&self_loop(1.0, 0.95), 1e-10, 100_000).unwrap();
        assert!((v[0] - 20.0).abs() < 1e-8);
        let z = value_iteration(&self_loop(0.0, 0.95), 1e-10, 10).unwrap();
        assert_eq!(z[0], 0.0);
        assert!(matches!(
            value_iteration(&self_loop(1.0, 0.95), 1e-10, 3),
            Err(Error::NotConverged { .. })
        ));
        assert!(value_iteration(&self_loop(1.0, 0.95), 0.0, 3).is_err());
    }

    #[test]
    fn greedy_single_action_and_tie_rule() {
        let p = greedy_policy(&self_loop(1.0, 0.5), &[2.0]).unwrap();
        assert_eq!(p.deterministic_action(0), Some(0));

        let twin = TabularMdp::new(
            2,
            2,
            vec![vec![(1, 1.0)], vec![(1, 1.0)], vec![(0, 1.0)], vec![(1, 1.0)]],
            vec![0.0, 0.0],
            0.9,
            vec![true; 4],
        )
        .unwrap();
        let p = greedy_policy(&twin, &[1.0, 1.0]).unwrap();
        assert_eq!(p.deterministic_action(0), Some(0));
        assert_eq!(p.deterministic_action(1), Some(0));
        let p = greedy_policy(&twin, &[0.0, 1.0]).unwrap();
        assert_eq!(p.deterministic_action(1), Some(1));
    }

    #[test]
    fn visitation_single_state_and_absorbing_chain() {
        let m = self_loop(0.0, 0.5);
        let pol = greedy_policy(&m, &[0.0]).unwrap();
        let d = visitation_distribution(&m, &pol, 3, 4, &Distribution::uniform(1), 1).unwrap();
        assert_eq!(d.mass(), &[1.0]);

        // Starting uniformly, occupancy of the absorbing state over 101 time
        // points is (0.5 * 100 + 0.5 * 101) / 101 ≈ 0.995.
        let c = chain();
        let pol = greedy_policy(&c, &[0.0, 0.0]).unwrap();
        let d = visitation_distribution(&c, &pol, 200, 100, &Distribution::uniform(2), 3).unwrap();
        assert!(d.mass()[1] >= 0.9);
        assert!(visitation_distribution(&c, &pol, 0, 1, &Distribution::uniform(2), 3).is_err());
    }

    #[test]
    fn visitation_is_seed_deterministic() {
        let m = TabularMdp::new(
            2,
            1,
            vec![vec![(0, 0.3), (1, 0.7)], vec![(0, 0.6), (1, 0.4)]],
            vec![0.0, 1.0],
            0.9,
            vec![true, true],
        )
        .unwrap();
        let pol = greedy_policy(&m, &[0.0, 0.0]).unwrap();
        let a = visitation_distribution(&m, &pol, 50, 10, &Distribution::uniform(2), 99).unwrap();
        let b = visitation_distribution(&m, &pol, 50, 10, &Distribution::uniform(2), 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complement_rules() {
        let u = complement_distribution(&Distribution::uniform(4)).unwrap();
        for &m in u.mass() {
            assert!((m - 0.25).abs() < 1e-12);
        }
        // (1/2)(1 − 0.75/0.75) = 0 and (1/2)(1 − 0.25/0.75) = 1/3, each + 1e-12.
        let c = complement_distribution(&Distribution::new(vec![0.75, 0.25]).unwrap()).unwrap();
        let expected0 = 1e-12 / (1.0 / 3.0 + 2e-12);
        assert!((c.mass()[0] - expected0).abs() < 1e-15);
        assert!((c.mass()[1] - (1.0 - expected0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_mdps_rejected() {
        assert!(TabularMdp::new(1, 1, vec![vec![(0, 0.9)]], vec![0.0], 0.5, vec![true]).is_err());
        assert!(TabularMdp::new(1, 1, vec![vec![(0, 1.0)]], vec![0.0], 1.0, vec![true]).is_err());
        assert!(TabularMdp::new(1, 1, vec![vec![]], vec![0.0], 0.5, vec![false]).is_err());
        assert!(TabularMdp::new(1, 1, vec![vec![(1, 1.0)]], vec![0.0], 0.5, vec![true]).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::from_weights(&[0.0, 0.0]).is_err());
        assert_eq!(Distribution::from_weights(&[1.0, 3.0]).unwrap().mass(), &[0.25, 0.75]);
    }
}
