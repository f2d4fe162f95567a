//! Lyapunov-weighted approximation-error bound for RALP.
//!
//! The pieces compose as follows. A nonnegative `L` with
//! `γ (HL)(s) ≤ β L(s)` off an exception set `B` (with `β < 1`) measures how
//! strongly the MDP drifts toward `B`. With `t*` the best achievable
//! `max_s |V*(s) − Φ(s)w| / L(s)` over the L1 ball `‖w_{−1}‖₁ ≤ ψ`, and
//! `ε_p = δ_φψ + δ_R + δ_Pψ` the slack from unsampled state-action pairs,
//!
//! ```text
//! ‖V* − Φw̃‖_{1,ρ} ≤ 2 ρᵀL / (1 − β) · t* + 2 ε_p / (1 − γ)
//! ```
//!
//! whenever `L = Φw_L` and the shifted point `w̄ = w* + t*(2/(1−β) − 1) w_L`
//! stays inside the L1 ball.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{dot, FeatureDictionary};
use crate::lp::{solve_lp_with_generation, Constraint, ExplicitOracle, LpProblem, LpStatus, SolveOptions};
use crate::mdp::{max_abs_diff, value_iteration, Distribution, TabularMdp};
use crate::ralp::{SampleSet, Weights};
use crate::room::LyapunovSpec;

/// Slack tolerated on the `w̄ ∈ W` budget check.
pub const BUDGET_TOL: f64 = 1e-8;

/// `(HL)(s) = max_a Σ_{s'} p(s'|s,a) L(s')` over allowed actions.
pub fn apply_h(mdp: &TabularMdp, l: &[f64]) -> Result<Vec<f64>> {
    if l.len() != mdp.n_states() {
        return Err(Error::Dimension {
            what: "Lyapunov vector",
            expected: mdp.n_states(),
            got: l.len(),
        });
    }
    if let Some(s) = l.iter().position(|v| !(*v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("H needs nonnegative input; state {s} is {}", l[s])));
    }
    Ok((0..mdp.n_states())
        .map(|s| {
            mdp.allowed_actions(s)
                .map(|a| mdp.expectation(s, a, l))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// `β = max_{s∉B} γ (HL)(s) / L(s)`, also stored in `spec.beta`.
///
/// The function is a valid Lyapunov function iff the result is below 1; the
/// value is returned either way. An empty complement of `B` gives 0.
pub fn lyapunov_beta(mdp: &TabularMdp, spec: &mut LyapunovSpec) -> Result<f64> {
    let hl = apply_h(mdp, &spec.values)?;
    let mut beta: f64 = 0.0;
    for s in 0..mdp.n_states() {
        if spec.in_exception_set(s) {
            continue;
        }
        let l = spec.values[s];
        if l <= 0.0 {
            return Err(Error::LyapunovZero { state: s });
        }
        beta = beta.max(mdp.gamma() * hl[s] / l);
    }
    spec.beta = Some(beta);
    Ok(beta)
}

/// `max_i |U_i F_i|`.
pub fn weighted_max_norm(u: &[f64], f: &[f64]) -> Result<f64> {
    same_len(u, f)?;
    Ok(u.iter().zip(f).map(|(a, b)| (a * b).abs()).fold(0.0, f64::max))
}

/// `Σ_i |U_i F_i|`.
pub fn weighted_l1_norm(u: &[f64], f: &[f64]) -> Result<f64> {
    same_len(u, f)?;
    Ok(u.iter().zip(f).map(|(a, b)| (a * b).abs()).sum())
}

fn same_len(u: &[f64], f: &[f64]) -> Result<()> {
    if u.len() != f.len() {
        return Err(Error::Dimension {
            what: "weighted norm operands",
            expected: u.len(),
            got: f.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaEstimates {
    pub delta_phi: f64,
    pub delta_r: f64,
    pub delta_p: f64,
}

/// How the witness sample for an unsampled pair is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessKey {
    /// Smallest feature ∞-distance `‖φ(σ.s) − φ(s)‖_∞`.
    FeatureDistance,
    /// Smallest per-pair slack `δ_φψ + δ_R + δ_Pψ`.
    Slack { psi: f64 },
}

/// Per-pair discrepancies of a witness sample.
fn discrepancies(
    mdp: &TabularMdp,
    features: &[Vec<f64>],
    s: usize,
    witness: usize,
    a: usize,
) -> DeltaEstimates {
    let delta_phi = max_abs_diff(&features[witness], &features[s]);
    let delta_r = (mdp.reward(witness) - mdp.reward(s)).abs();
    let (p, q) = (mdp.successors(witness, a), mdp.successors(s, a));
    let mut delta_p: f64 = 0.0;
    for &(n, pv) in p {
        delta_p = delta_p.max((pv - mdp.transition_prob(s, a, n)).abs());
    }
    for &(n, qv) in q {
        delta_p = delta_p.max((qv - mdp.transition_prob(witness, a, n)).abs());
    }
    DeltaEstimates {
        delta_phi,
        delta_r,
        delta_p,
    }
}

/// Sufficient-sampling constants: for every allowed `(s, a)` pick one sample
/// with action `a` by `key` (first sample wins ties) and take the maxima of
/// its discrepancies over all pairs.
pub fn estimate_deltas(
    mdp: &TabularMdp,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    samples: &SampleSet,
    key: WitnessKey,
) -> Result<DeltaEstimates> {
    if coords.len() != mdp.n_states() {
        return Err(Error::Dimension {
            what: "state coordinates",
            expected: mdp.n_states(),
            got: coords.len(),
        });
    }
    let features: Vec<Vec<f64>> = coords.iter().map(|c| dict.row(c)).collect();
    let mut by_action: Vec<Vec<usize>> = vec![Vec::new(); mdp.n_actions()];
    for smp in samples.samples() {
        if smp.action >= mdp.n_actions() || smp.state >= mdp.n_states() {
            return Err(Error::InvalidArgument("sample out of range".into()));
        }
        by_action[smp.action].push(smp.state);
    }

    let mut out = DeltaEstimates::default();
    for s in 0..mdp.n_states() {
        for a in mdp.allowed_actions(s) {
            let candidates = &by_action[a];
            if candidates.is_empty() {
                return Err(Error::UnsampledAction { action: a });
            }
            let mut best: Option<(f64, DeltaEstimates)> = None;
            for &w in candidates {
                let d = discrepancies(mdp, &features, s, w, a);
                let score = match key {
                    WitnessKey::FeatureDistance => d.delta_phi,
                    WitnessKey::Slack { psi } => epsilon_p(&d, psi),
                };
                if best.is_none_or(|(b, _)| score < b) {
                    best = Some((score, d));
                }
                if score == 0.0 {
                    break;
                }
            }
            let (_, d) = best.expect("nonempty candidates");
            out.delta_phi = out.delta_phi.max(d.delta_phi);
            out.delta_r = out.delta_r.max(d.delta_r);
            out.delta_p = out.delta_p.max(d.delta_p);
        }
    }
    Ok(out)
}

/// `ε_p = δ_φ ψ + δ_R + δ_P ψ`.
pub fn epsilon_p(d: &DeltaEstimates, psi: f64) -> f64 {
    d.delta_phi * psi + d.delta_r + d.delta_p * psi
}

/// Result of [`best_weighted_approx`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFit {
    pub weights: Weights,
    /// `t* = min_w max_{s: L(s)>0} |V*(s) − Φ(s)w| / L(s)`.
    pub error: f64,
    /// States dropped because `L(s) = 0`.
    pub excluded: Vec<usize>,
}

/// Best L1-budgeted fit of `v_star` in the `1/L`-weighted max norm.
///
/// Solves `min t` s.t. `|V*(s) − Φ(s)w| ≤ t L(s)` for every state with
/// `L(s) > 0` and `‖w_{−1}‖₁ ≤ ψ`, by constraint generation over the state
/// rows.
pub fn best_weighted_approx(
    v_star: &[f64],
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    psi: f64,
    l: &[f64],
    opts: &SolveOptions,
) -> Result<WeightedFit> {
    if v_star.len() != l.len() || coords.len() != l.len() {
        return Err(Error::Dimension {
            what: "value / Lyapunov / coordinate vectors",
            expected: v_star.len(),
            got: l.len().min(coords.len()),
        });
    }
    if !(psi >= 0.0) {
        return Err(Error::InvalidArgument(format!("psi {psi} must be nonnegative")));
    }
    let n_columns = dict.n_columns();
    // LP variables: t, bias, then (w⁺, w⁻) per Gaussian column.
    let n_vars = 2 + 2 * (n_columns - 1);
    let mut objective = vec![0.0; n_vars];
    objective[0] = 1.0;
    let mut master = LpProblem::new(objective);
    master.set_lower_bound(0, 0.0);
    for j in 2..n_vars {
        master.set_lower_bound(j, 0.0);
    }
    if n_columns > 1 {
        let mut budget = vec![1.0; n_vars];
        budget[0] = 0.0;
        budget[1] = 0.0;
        master.add_le(budget, psi);
    }

    let mut excluded = Vec::new();
    let mut rows = Vec::with_capacity(2 * l.len());
    for (s, (&ls, &v)) in l.iter().zip(v_star).enumerate() {
        if !(ls > 0.0) {
            excluded.push(s);
            continue;
        }
        let phi = dict.row(&coords[s]);
        let mut upper = Vec::with_capacity(n_vars);
        upper.push(-ls);
        upper.push(phi[0]);
        for &f in &phi[1..] {
            upper.push(f);
            upper.push(-f);
        }
        // Φw − tL ≤ V*  and  −Φw − tL ≤ −V*
        let mut lower: Vec<f64> = upper.iter().map(|c| -c).collect();
        lower[0] = -ls;
        rows.push(Constraint::new(upper, v));
        rows.push(Constraint::new(lower, -v));
    }
    if !excluded.is_empty() {
        warn!("weighted fit skips {} state(s) with L = 0", excluded.len());
    }
    let mut oracle = ExplicitOracle::new(rows, 64);
    let sol = solve_lp_with_generation(&master, &mut oracle, opts)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::Infeasible => return Err(Error::Infeasible),
    }
    let mut w = Vec::with_capacity(n_columns);
    w.push(sol.x[1]);
    for k in 1..n_columns {
        w.push(sol.x[2 * k] - sol.x[2 * k + 1]);
    }
    Ok(WeightedFit {
        weights: Weights { w },
        error: sol.x[0],
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WBar {
    pub weights: Weights,
    /// `‖w̄_{−1}‖₁`, to compare against ψ.
    pub l1_without_bias: f64,
}

/// `w̄ = w* + err · (2/(1−β) − 1) · w_L`.
pub fn construct_wbar(w_star: &Weights, err: f64, beta: f64, w_l: &Weights) -> Result<WBar> {
    if !(beta < 1.0) {
        return Err(Error::LyapunovInvalid { beta });
    }
    if w_star.w.len() != w_l.w.len() {
        return Err(Error::Dimension {
            what: "Lyapunov weights",
            expected: w_star.w.len(),
            got: w_l.w.len(),
        });
    }
    let k = err * (2.0 / (1.0 - beta) - 1.0);
    let weights = Weights {
        w: w_star.w.iter().zip(&w_l.w).map(|(a, b)| a + k * b).collect(),
    };
    let l1_without_bias = weights.l1_without_bias();
    Ok(WBar {
        weights,
        l1_without_bias,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub gamma: f64,
    pub psi: f64,
    pub beta: f64,
    pub rho_dot_l: f64,
    pub min_weighted_err: f64,
    pub deltas: DeltaEstimates,
    pub epsilon_p: f64,
    pub bound_value: f64,
    pub wbar_in_w: bool,
    /// The min term was computed against the sampled MDP's own `V*` rather
    /// than the reward-perturbed MDP whose RALP matches the sampled one.
    pub surrogate: bool,
    /// `‖V* − Φw̃‖_{1,ρ}` of an actual RALP solution, when evaluated.
    pub realized_error: Option<f64>,
}

impl BoundReport {
    pub fn holds(&self) -> Option<bool> {
        self.realized_error.map(|e| e <= self.bound_value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Inputs to [`theorem1_bound`] beyond the dictionary.
#[derive(Debug, Clone, Copy)]
pub struct BoundTerms {
    pub beta: f64,
    pub min_err: f64,
    pub deltas: DeltaEstimates,
    pub psi: f64,
    pub gamma: f64,
    pub wbar_in_w: bool,
}

/// `2 ρᵀΦw_L / (1−β) · min_err + 2 ε_p / (1−γ)`.
pub fn theorem1_bound(
    rho: &Distribution,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    w_l: &Weights,
    terms: BoundTerms,
) -> Result<BoundReport> {
    if !(terms.beta < 1.0) {
        return Err(Error::LyapunovInvalid { beta: terms.beta });
    }
    if rho.len() != coords.len() {
        return Err(Error::Dimension {
            what: "relevance distribution",
            expected: coords.len(),
            got: rho.len(),
        });
    }
    let rho_dot_l: f64 = rho
        .mass()
        .iter()
        .zip(coords)
        .filter(|(r, _)| **r != 0.0)
        .map(|(r, c)| r * dot(&dict.row(c), &w_l.w))
        .sum();
    let eps = epsilon_p(&terms.deltas, terms.psi);
    let bound_value =
        2.0 * rho_dot_l / (1.0 - terms.beta) * terms.min_err + 2.0 * eps / (1.0 - terms.gamma);
    Ok(BoundReport {
        gamma: terms.gamma,
        psi: terms.psi,
        beta: terms.beta,
        rho_dot_l,
        min_weighted_err: terms.min_err,
        deltas: terms.deltas,
        epsilon_p: eps,
        bound_value,
        wbar_in_w: terms.wbar_in_w,
        surrogate: eps > 0.0,
        realized_error: None,
    })
}

/// `(‖V₁* − V₂*‖_∞, ‖R₁ − R₂‖_∞ / (1−γ))` for two MDPs differing only in rewards.
pub fn perturbation_value_gap(m1: &TabularMdp, m2: &TabularMdp, tol: f64) -> Result<(f64, f64)> {
    if !m1.same_structure(m2) {
        return Err(Error::InvalidArgument("MDPs differ in more than their rewards".into()));
    }
    let v1 = value_iteration(m1, tol, usize::MAX)?;
    let v2 = value_iteration(m2, tol, usize::MAX)?;
    let dr = max_abs_diff(m1.rewards(), m2.rewards());
    Ok((v1.max_abs_diff(&v2), dr / (1.0 - m1.gamma())))
}
