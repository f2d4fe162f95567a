//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use ralp::bounds::{
    best_weighted_approx, construct_wbar, estimate_deltas, lyapunov_beta, theorem1_bound, weighted_l1_norm,
    BoundTerms, WitnessKey, BUDGET_TOL,
};
use ralp::lp::LpProblem;
use ralp::mdp::{bellman_max, optimal_values};
use ralp::ralp::{approximate_values, solve_ralp};
use ralp::sampling::exhaustive_samples;
use ralp::{Distribution, FeatureDictionary, LyapunovSpec, RalpConfig, TabularMdp, Weights};

/// Dense Gaussian elimination with partial pivoting. `None` if singular.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-11 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Rows `a·x ≤ b` including finite lower bounds as `−x_j ≤ −l_j`.
fn all_rows(p: &LpProblem) -> Vec<(Vec<f64>, f64)> {
    let n = p.n_vars();
    let mut rows: Vec<(Vec<f64>, f64)> = p.constraints.iter().map(|c| (c.coeffs.clone(), c.bound)).collect();
    for (j, &l) in p.lower_bounds.iter().enumerate() {
        if l.is_finite() {
            let mut r = vec![0.0; n];
            r[j] = -1.0;
            rows.push((r, -l));
        }
    }
    rows
}

fn subsets(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Minimum of `c·x` over the vertices of `{a·x ≤ b}`, or `None` without
/// feasible vertices.
fn best_vertex(c: &[f64], rows: &[(Vec<f64>, f64)], tol: f64) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    subsets(rows.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| rows[i].1).collect();
        let Some(x) = gauss_solve(a, b) else { return };
        let feasible = rows
            .iter()
            .all(|(r, bound)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bound + tol * (1.0 + bound.abs()));
        if feasible {
            let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    });
    best
}

/// Vertex-enumeration oracle for LPs whose variables all have finite lower
/// bounds (so a nonempty feasible set has a vertex).
///
/// Unboundedness is decided on the recession cone: the LP is unbounded iff
/// it is feasible and `min c·d` over `{A d ≤ 0, d ≥ 0, Σd ≤ 1}` is negative.
pub fn vertex_oracle(p: &LpProblem) -> OracleOutcome {
    assert!(p.lower_bounds.iter().all(|l| l.is_finite()), "oracle needs finite lower bounds");
    let n = p.n_vars();
    let rows = all_rows(p);
    let Some(best) = best_vertex(&p.objective, &rows, 1e-9) else {
        return OracleOutcome::Infeasible;
    };
    let mut cone: Vec<(Vec<f64>, f64)> = p.constraints.iter().map(|c| (c.coeffs.clone(), 0.0)).collect();
    for j in 0..n {
        let mut r = vec![0.0; n];
        r[j] = -1.0;
        cone.push((r, 0.0));
    }
    cone.push((vec![1.0; n], 1.0));
    let ray = best_vertex(&p.objective, &cone, 1e-9).expect("origin is a vertex of the cone slice");
    if ray < -1e-9 {
        OracleOutcome::Unbounded
    } else {
        OracleOutcome::Optimal(best)
    }
}

/// Small random LP with integer data and nonnegative (possibly shifted)
/// variables.
pub fn random_lp(rng: &mut impl Rng) -> LpProblem {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=10);
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let mut p = LpProblem::new(objective);
    for j in 0..n {
        let l = if rng.gen_bool(0.7) { 0.0 } else { rng.gen_range(-3..=3) as f64 };
        p.set_lower_bound(j, l);
    }
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(-5..=5) as f64 })
            .collect();
        let bound = rng.gen_range(-6..=12) as f64;
        p.add_le(coeffs, bound);
    }
    p
}

/// Random MDP whose transition probabilities are multiples of 1/64, so
/// every row sums to exactly one in floating point.
pub fn random_dyadic_mdp(rng: &mut impl Rng, n_states: usize, n_actions: usize, gamma: f64) -> TabularMdp {
    let mut transitions = Vec::with_capacity(n_states * n_actions);
    for _ in 0..n_states * n_actions {
        let mut counts = vec![0u32; n_states];
        let support = rng.gen_range(1..=3.min(n_states));
        let targets: Vec<usize> = (0..support).map(|_| rng.gen_range(0..n_states)).collect();
        for _ in 0..64 {
            counts[targets[rng.gen_range(0..support)]] += 1;
        }
        transitions.push(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(s, &c)| (s, c as f64 / 64.0))
                .collect(),
        );
    }
    let rewards = (0..n_states).map(|_| rng.gen_range(-1.0..1.0)).collect();
    TabularMdp::new(n_states, n_actions, transitions, rewards, gamma, vec![true; n_states * n_actions]).unwrap()
}

/// Random MDP with deterministic transitions.
pub fn random_deterministic_mdp(rng: &mut impl Rng, n_states: usize, n_actions: usize, gamma: f64) -> TabularMdp {
    let transitions = (0..n_states * n_actions)
        .map(|_| vec![(rng.gen_range(0..n_states), 1.0)])
        .collect();
    let rewards = (0..n_states).map(|_| rng.gen_range(-1.0..1.0)).collect();
    TabularMdp::new(n_states, n_actions, transitions, rewards, gamma, vec![true; n_states * n_actions]).unwrap()
}

/// Exact `V_π = (I − γP_π)⁻¹ R` for a deterministic policy.
pub fn policy_values(mdp: &TabularMdp, actions: &[usize]) -> Vec<f64> {
    let n = mdp.n_states();
    let mut a = vec![vec![0.0; n]; n];
    for s in 0..n {
        a[s][s] += 1.0;
        for &(t, p) in mdp.successors(s, actions[s]) {
            a[s][t] -= mdp.gamma() * p;
        }
    }
    gauss_solve(a, mdp.rewards().to_vec()).expect("I − γP is nonsingular")
}

/// `V*` by exhaustive policy enumeration (tiny MDPs only).
pub fn brute_force_optimal(mdp: &TabularMdp) -> Vec<f64> {
    let n = mdp.n_states();
    let allowed: Vec<Vec<usize>> = (0..n).map(|s| mdp.allowed_actions(s).collect()).collect();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut idx = vec![0usize; n];
    loop {
        let actions: Vec<usize> = (0..n).map(|s| allowed[s][idx[s]]).collect();
        for (b, v) in best.iter_mut().zip(policy_values(mdp, &actions)) {
            *b = b.max(v);
        }
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            idx[k] += 1;
            if idx[k] < allowed[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Distinct random integer coordinates in `[1, 8]²`.
pub fn random_coords(rng: &mut impl Rng, n: usize) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(n);
    while out.len() < n {
        let c = [rng.gen_range(1..=8) as f64, rng.gen_range(1..=8) as f64];
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Gaussians at the first `k` coordinates with two widths.
pub fn small_dictionary(coords: &[[f64; 2]], k: usize) -> FeatureDictionary {
    FeatureDictionary::new(coords[..k.min(coords.len())].to_vec(), vec![1.0, 4.0]).unwrap()
}

/// Pieces of the end-to-end bound on an MDP sampled exhaustively, with
/// `ρ` uniform and the bias-only Lyapunov function `L = 1`.
#[derive(Debug, Clone, Copy)]
pub struct Theorem1Check {
    pub realized: f64,
    pub bound: f64,
    pub beta: f64,
    pub min_err: f64,
    pub rho_dot_l: f64,
    pub epsilon_p: f64,
    pub wbar_in_w: bool,
}

pub fn theorem1_check(mdp: &TabularMdp, dict: &FeatureDictionary, coords: &[[f64; 2]], psi: f64) -> Theorem1Check {
    let n = mdp.n_states();
    let samples = exhaustive_samples(mdp);
    let mut cfg = RalpConfig::new(psi, mdp.gamma()).with_generation(256);
    cfg.count_duplicates = false;
    let w = solve_ralp(&samples, dict, coords, &cfg).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let v_star = optimal_values(mdp).unwrap();
    let approx = approximate_values(dict, &w, coords, &all).unwrap();
    let rho = Distribution::uniform(n);
    let diff: Vec<f64> = v_star.iter().zip(approx.iter()).map(|(a, b)| a - b).collect();
    let realized = weighted_l1_norm(rho.mass(), &diff).unwrap();

    let w_l = Weights::bias_only(dict.n_columns(), 1.0);
    let mut spec = LyapunovSpec::new(vec![1.0; n], vec![]).unwrap();
    let beta = lyapunov_beta(mdp, &mut spec).unwrap();
    let fit = best_weighted_approx(&v_star, dict, coords, psi, &spec.values, &cfg.solver).unwrap();
    let wbar = construct_wbar(&fit.weights, fit.error, beta, &w_l).unwrap();
    let deltas = estimate_deltas(mdp, dict, coords, &samples, WitnessKey::FeatureDistance).unwrap();
    let report = theorem1_bound(
        &rho,
        dict,
        coords,
        &w_l,
        BoundTerms {
            beta,
            min_err: fit.error,
            deltas,
            psi,
            gamma: mdp.gamma(),
            wbar_in_w: wbar.l1_without_bias <= psi + BUDGET_TOL,
        },
    )
    .unwrap();
    Theorem1Check {
        realized,
        bound: report.bound_value,
        beta,
        min_err: fit.error,
        rho_dot_l: report.rho_dot_l,
        epsilon_p: report.epsilon_p,
        wbar_in_w: report.wbar_in_w,
    }
}

/// Largest entry of `TΦw̄ − Φw̄` for the `w̄` built from the best weighted
/// fit under `L = Φw_L`, or `None` when `Φw_L` is not a Lyapunov function
/// (`β ≥ 1`).
pub fn lemma5_violation(
    mdp: &TabularMdp,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    psi: f64,
    w_l: &Weights,
) -> Option<f64> {
    let n = mdp.n_states();
    let all: Vec<usize> = (0..n).collect();
    let l = approximate_values(dict, w_l, coords, &all).unwrap().into_inner();
    let mut spec = LyapunovSpec::new(l.clone(), vec![]).unwrap();
    let beta = lyapunov_beta(mdp, &mut spec).unwrap();
    if beta >= 1.0 {
        return None;
    }
    let v_star = optimal_values(mdp).unwrap();
    let fit = best_weighted_approx(&v_star, dict, coords, psi, &l, &Default::default()).unwrap();
    let wbar = construct_wbar(&fit.weights, fit.error, beta, w_l).unwrap();
    let phi_wbar = approximate_values(dict, &wbar.weights, coords, &all).unwrap();
    let t_phi = bellman_max(mdp, &phi_wbar).unwrap();
    Some(t_phi.iter().zip(phi_wbar.iter()).map(|(t, v)| t - v).fold(f64::NEG_INFINITY, f64::max))
}
