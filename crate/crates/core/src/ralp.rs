//! The L1-regularized approximate linear program.
//!
//! Given samples `(s, a, r, s')`, a feature dictionary `Φ` and relevance
//! weights `ρ`, solve
//!
//! ```text
//! min_w   Σ_σ ρ(σ) Φ(σ.s)·w
//! s.t.    r + γ Φ(σ.s')·w ≤ Φ(σ.s)·w      for every sample σ
//!         Σ_{j≠bias} |w_j| ≤ ψ
//! ```
//!
//! LP variables are the free bias followed by a `(w⁺, w⁻)` nonnegative pair
//! per Gaussian column.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::features::{dot, Column, FeatureDictionary};
use crate::lp::{
    solve_lp, solve_lp_with_generation, Constraint, ExplicitOracle, LpProblem, LpSolution, LpStatus,
    SolveOptions,
};
use crate::mdp::{TabularMdp, ValueVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub next_state: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    samples: Vec<Sample>,
}

impl SampleSet {
    pub fn new(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn push(&mut self, s: Sample) {
        self.samples.push(s);
    }

    pub fn extend(&mut self, other: &SampleSet) {
        self.samples.extend_from_slice(&other.samples);
    }

    pub fn states(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.state).collect()
    }

    /// Checks that every sample is an allowed, possible transition of `mdp`
    /// carrying the state's reward.
    pub fn check_against(&self, mdp: &TabularMdp) -> Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            if s.state >= mdp.n_states() || s.next_state >= mdp.n_states() || s.action >= mdp.n_actions() {
                return Err(Error::InvalidArgument(format!("sample {i} out of range")));
            }
            if !mdp.is_allowed(s.state, s.action) {
                return Err(Error::InvalidArgument(format!("sample {i} uses a disallowed action")));
            }
            if mdp.transition_prob(s.state, s.action, s.next_state) == 0.0 {
                return Err(Error::InvalidArgument(format!("sample {i} has an impossible successor")));
            }
            if s.reward != mdp.reward(s.state) {
                return Err(Error::InvalidArgument(format!("sample {i} reward differs from R(s)")));
            }
        }
        Ok(())
    }

    /// `s,a,r,s_next` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,a,r,s_next\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{:?},{}", s.state, s.action, s.reward, s.next_state);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "s,a,r,s_next" => {}
            _ => return Err(Error::parse(1, "expected header `s,a,r,s_next`")),
        }
        let mut samples = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(Error::parse(i + 1, "expected four fields"));
            }
            let bad = |_| Error::parse(i + 1, format!("cannot parse `{line}`"));
            samples.push(Sample {
                state: f[0].parse().map_err(bad)?,
                action: f[1].parse().map_err(bad)?,
                reward: f[2].parse().map_err(|_| Error::parse(i + 1, "bad reward"))?,
                next_state: f[3].parse().map_err(bad)?,
            });
        }
        Ok(Self { samples })
    }
}

/// State-relevance weights in the objective.
#[derive(Debug, Clone, PartialEq)]
pub enum Relevance {
    /// `ρ = 1` at every sampled state.
    Ones,
    /// `ρ(σ.s)` looked up per state (e.g. a distribution over states).
    PerState(Vec<f64>),
    /// One weight per sample, in sample order.
    PerSample(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RalpConfig {
    /// L1 budget on the non-bias weights.
    pub psi: f64,
    pub rho: Relevance,
    pub gamma: f64,
    /// Rescale per-sample weights to sum to one.
    pub renormalize_rho: bool,
    /// Repeated sampled states contribute once per occurrence when true,
    /// once in total when false.
    pub count_duplicates: bool,
    pub solver: SolveOptions,
    /// Solve by constraint generation with this many cuts per round.
    pub generation_batch: Option<usize>,
}

impl RalpConfig {
    pub fn new(psi: f64, gamma: f64) -> Self {
        Self {
            psi,
            rho: Relevance::Ones,
            gamma,
            renormalize_rho: false,
            count_duplicates: true,
            solver: SolveOptions::default(),
            generation_batch: None,
        }
    }

    pub fn with_rho(mut self, rho: Relevance) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_generation(mut self, batch: usize) -> Self {
        self.generation_batch = Some(batch);
        self
    }
}

/// Dictionary weights; index 0 is the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub w: Vec<f64>,
}

impl Weights {
    pub fn zeros(n_columns: usize) -> Self {
        Self { w: vec![0.0; n_columns] }
    }

    pub fn bias_only(n_columns: usize, bias: f64) -> Self {
        let mut w = vec![0.0; n_columns];
        w[0] = bias;
        Self { w }
    }

    pub fn bias(&self) -> f64 {
        self.w[0]
    }

    /// `‖w_{−1}‖₁`: L1 norm of all weights except the bias.
    pub fn l1_without_bias(&self) -> f64 {
        self.w[1..].iter().map(|x| x.abs()).sum()
    }

    /// `column,center_row,center_col,variance,weight`; the bias row leaves
    /// the center and variance blank.
    pub fn to_csv(&self, dict: &FeatureDictionary) -> String {
        let mut out = String::from("column,center_row,center_col,variance,weight\n");
        for (j, w) in self.w.iter().enumerate() {
            match dict.column(j) {
                Column::Bias => {
                    let _ = writeln!(out, "{j},,,,{w:?}");
                }
                Column::Gaussian { center, variance, .. } => {
                    let _ = writeln!(out, "{j},{:?},{:?},{variance:?},{w:?}", center[0], center[1]);
                }
            }
        }
        out
    }
}

/// An assembled RALP: the LP plus the per-sample Bellman rows.
#[derive(Debug, Clone)]
pub struct RalpProblem {
    pub lp: LpProblem,
    /// Bellman rows, one per sample, in LP variable space.
    pub sample_rows: Vec<Constraint>,
    n_columns: usize,
}

fn lp_vars(n_columns: usize) -> usize {
    2 * (n_columns - 1) + 1
}

/// Expands a weight-space coefficient row into LP variable space.
fn split_row(row: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(lp_vars(row.len()));
    out.push(row[0]);
    for &g in &row[1..] {
        out.push(g);
        out.push(-g);
    }
    out
}

fn per_sample_rho(samples: &SampleSet, cfg: &RalpConfig) -> Result<Vec<f64>> {
    let n = samples.len();
    let mut rho = match &cfg.rho {
        Relevance::Ones => vec![1.0; n],
        Relevance::PerState(by_state) => samples
            .samples()
            .iter()
            .map(|s| {
                by_state.get(s.state).copied().ok_or(Error::Dimension {
                    what: "per-state relevance weights",
                    expected: s.state + 1,
                    got: by_state.len(),
                })
            })
            .collect::<Result<_>>()?,
        Relevance::PerSample(w) => {
            if w.len() != n {
                return Err(Error::Dimension {
                    what: "per-sample relevance weights",
                    expected: n,
                    got: w.len(),
                });
            }
            w.clone()
        }
    };
    if rho.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidArgument("relevance weights must be nonnegative".into()));
    }
    if !cfg.count_duplicates {
        let mut seen = HashSet::new();
        for (r, s) in rho.iter_mut().zip(samples.samples()) {
            if !seen.insert(s.state) {
                *r = 0.0;
            }
        }
    }
    if cfg.renormalize_rho {
        let total: f64 = rho.iter().sum();
        if total > 0.0 {
            rho.iter_mut().for_each(|r| *r /= total);
        }
    }
    Ok(rho)
}

/// Builds the LP for `samples` under `dict`, with features evaluated at
/// `coords[state]`.
pub fn assemble_ralp(
    samples: &SampleSet,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    cfg: &RalpConfig,
) -> Result<RalpProblem> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("RALP needs at least one sample".into()));
    }
    if !(cfg.psi >= 0.0 && cfg.psi.is_finite()) {
        return Err(Error::InvalidArgument(format!("psi {} must be nonnegative", cfg.psi)));
    }
    if let Some(s) = samples
        .samples()
        .iter()
        .find(|s| s.state >= coords.len() || s.next_state >= coords.len())
    {
        return Err(Error::InvalidArgument(format!("sample state {} has no coordinates", s.state)));
    }
    let rho = per_sample_rho(samples, cfg)?;
    let n_columns = dict.n_columns();
    let n_vars = lp_vars(n_columns);

    let mut objective_w = vec![0.0; n_columns];
    let mut sample_rows = Vec::with_capacity(samples.len());
    for (sample, &weight) in samples.samples().iter().zip(&rho) {
        let here = dict.row(&coords[sample.state]);
        let next = dict.row(&coords[sample.next_state]);
        if weight != 0.0 {
            for (o, h) in objective_w.iter_mut().zip(&here) {
                *o += weight * h;
            }
        }
        let g: Vec<f64> = here
            .iter()
            .zip(&next)
            .map(|(h, n)| cfg.gamma * n - h)
            .collect();
        sample_rows.push(Constraint::new(split_row(&g), -sample.reward));
    }

    let mut lp = LpProblem::new(split_row(&objective_w));
    for j in 1..n_vars {
        lp.set_lower_bound(j, 0.0);
    }
    let mut budget = vec![1.0; n_vars];
    budget[0] = 0.0;
    if n_vars > 1 {
        lp.add_le(budget, cfg.psi);
    }
    lp.constraints.extend(sample_rows.iter().cloned());
    Ok(RalpProblem {
        lp,
        sample_rows,
        n_columns,
    })
}

impl RalpProblem {
    pub fn weights_from_lp(&self, x: &[f64]) -> Weights {
        let mut w = Vec::with_capacity(self.n_columns);
        w.push(x[0]);
        for k in 1..self.n_columns {
            w.push(x[2 * k - 1] - x[2 * k]);
        }
        Weights { w }
    }

    /// Solves directly or by constraint generation, per `cfg`.
    pub fn solve(&self, cfg: &RalpConfig) -> Result<(Weights, LpSolution)> {
        let sol = match cfg.generation_batch {
            None => solve_lp(&self.lp, &cfg.solver)?,
            Some(batch) => {
                let mut master = self.lp.clone();
                let n_fixed = master.constraints.len() - self.sample_rows.len();
                master.constraints.truncate(n_fixed);
                // The sample with the largest reward bounds the bias from below.
                let seed_row = self
                    .sample_rows
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.bound.total_cmp(&b.1.bound))
                    .map(|(i, _)| i)
                    .expect("nonempty sample set");
                master.constraints.push(self.sample_rows[seed_row].clone());
                let mut oracle = ExplicitOracle::new(self.sample_rows.clone(), batch);
                oracle.mark_issued(seed_row);
                solve_lp_with_generation(&master, &mut oracle, &cfg.solver)?
            }
        };
        match sol.status {
            LpStatus::Optimal => Ok((self.weights_from_lp(&sol.x), sol)),
            LpStatus::Unbounded => Err(Error::Unbounded),
            // A large bias always satisfies every Bellman row.
            LpStatus::Infeasible => Err(Error::Infeasible),
        }
    }
}

/// Assembles and solves the RALP, returning the weights.
pub fn solve_ralp(
    samples: &SampleSet,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    cfg: &RalpConfig,
) -> Result<Weights> {
    Ok(assemble_ralp(samples, dict, coords, cfg)?.solve(cfg)?.0)
}

/// `Φ(s)·w` for each listed state.
pub fn approximate_values(
    dict: &FeatureDictionary,
    w: &Weights,
    coords: &[[f64; 2]],
    states: &[usize],
) -> Result<ValueVector> {
    if w.w.len() != dict.n_columns() {
        return Err(Error::Dimension {
            what: "weights",
            expected: dict.n_columns(),
            got: w.w.len(),
        });
    }
    ValueVector::new(states.iter().map(|&s| dot(&dict.row(&coords[s]), &w.w)).collect())
}

/// Largest `r + γΦ(s')w − Φ(s)w` over the samples (≤ 0 when all hold).
pub fn max_bellman_violation(
    samples: &SampleSet,
    dict: &FeatureDictionary,
    coords: &[[f64; 2]],
    gamma: f64,
    w: &Weights,
) -> f64 {
    samples
        .samples()
        .iter()
        .map(|s| {
            s.reward + gamma * dot(&dict.row(&coords[s.next_state]), &w.w)
                - dot(&dict.row(&coords[s.state]), &w.w)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
