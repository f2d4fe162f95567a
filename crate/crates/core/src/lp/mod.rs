//! Dense linear programming.
//!
//! Problems are `min c·x` subject to `A x ≤ b` and per-variable lower bounds
//! (`-inf` for free variables). [`solve_lp`] runs a two-phase tableau
//! simplex; [`solve_lp_with_generation`] wraps it in a cutting-plane loop for
//! problems whose constraints are produced lazily by an oracle.

mod generation;
mod simplex;

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub use generation::{solve_lp_with_generation, ConstraintOracle, ExplicitOracle};
pub use simplex::solve_lp;

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, bound: f64) -> Self {
        Self { coeffs, bound }
    }

    /// `coeffs·x − bound`; positive means violated.
    pub fn violation(&self, x: &[f64]) -> f64 {
        crate::features::dot(&self.coeffs, x) - self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Lower bound per variable; `f64::NEG_INFINITY` marks a free variable.
    pub lower_bounds: Vec<f64>,
}

impl LpProblem {
    /// All variables free, no constraints.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![f64::NEG_INFINITY; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `coeffs·x ≤ bound`.
    pub fn add_le(&mut self, coeffs: Vec<f64>, bound: f64) {
        self.constraints.push(Constraint::new(coeffs, bound));
    }

    /// Adds `coeffs·x ≥ bound`.
    pub fn add_ge(&mut self, coeffs: Vec<f64>, bound: f64) {
        self.add_le(coeffs.into_iter().map(|c| -c).collect(), -bound);
    }

    pub fn set_lower_bound(&mut self, var: usize, bound: f64) {
        self.lower_bounds[var] = bound;
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        crate::features::dot(&self.objective, x)
    }

    /// Largest violation over constraints and lower bounds (0 if feasible).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(x));
        let bounds = self.lower_bounds.iter().zip(x).map(|(&l, &v)| l - v);
        rows.chain(bounds).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.lower_bounds.len() != n {
            return Err(Error::Dimension {
                what: "lower bounds",
                expected: n,
                got: self.lower_bounds.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite objective coefficient".into()));
        }
        if self.lower_bounds.iter().any(|&l| l.is_nan() || l == f64::INFINITY) {
            return Err(Error::InvalidArgument("lower bound must be finite or -inf".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Dimension {
                    what: "constraint coefficients",
                    expected: n,
                    got: c.coeffs.len(),
                });
            }
            if !c.bound.is_finite() || c.coeffs.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("constraint {i} is not finite")));
            }
        }
        Ok(())
    }

    /// CPLEX LP text, for cross-checking with external solvers.
    ///
    /// Variables are named `x0, x1, ...` and rows `c0, c1, ...`. Free
    /// variables are declared `free`; every other variable gets an explicit
    /// lower bound.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("\\ written by ralp\nMinimize\n obj:");
        write_linear(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            write_linear(&mut out, &c.coeffs);
            let _ = writeln!(out, " <= {:?}", c.bound);
        }
        out.push_str("Bounds\n");
        for (j, &l) in self.lower_bounds.iter().enumerate() {
            if l == f64::NEG_INFINITY {
                let _ = writeln!(out, " x{j} free");
            } else {
                let _ = writeln!(out, " x{j} >= {l:?}");
            }
        }
        out.push_str("End\n");
        out
    }
}

fn write_linear(out: &mut String, coeffs: &[f64]) {
    let mut any = false;
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let sign = if c < 0.0 { '-' } else { '+' };
        if any || c < 0.0 {
            let _ = write!(out, " {sign}");
        }
        let _ = write!(out, " {:?} x{j}", c.abs());
        any = true;
    }
    if !any {
        out.push_str(" 0 x0");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point (meaningful only when optimal).
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Nonnegative multiplier per constraint with `c + Aᵀλ ≥ 0` on bounded
    /// variables and `= 0` on free ones (only when optimal).
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// The optimum, or an error for infeasible and unbounded outcomes.
    pub fn into_optimal(self) -> Result<Self> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iter: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            opt_tol: 1e-8,
            max_iter: 200_000,
            bland_after: 50,
        }
    }
}
