//! Cutting-plane wrapper around the simplex solver.

use super::{solve_lp, Constraint, LpProblem, LpSolution, LpStatus, SolveOptions};
use crate::error::{Error, Result};
use log::debug;

const MAX_ROUNDS: usize = 10_000;
/// Temporary box used when a relaxation is unbounded.
const BOX: f64 = 1e9;

/// Supplies constraints of an implicit LP that a candidate point violates.
pub trait ConstraintOracle {
    /// Constraints violated by `x` by more than `tol`, most violated first.
    /// An empty result certifies that `x` is feasible for the full problem.
    fn violated(&mut self, x: &[f64], tol: f64) -> Vec<Constraint>;
}

/// Oracle over an explicit constraint list, handing out at most `batch`
/// constraints per round. Each constraint is handed out at most once.
#[derive(Debug, Clone)]
pub struct ExplicitOracle {
    constraints: Vec<Constraint>,
    issued: Vec<bool>,
    batch: usize,
}

impl ExplicitOracle {
    pub fn new(constraints: Vec<Constraint>, batch: usize) -> Self {
        let issued = vec![false; constraints.len()];
        Self {
            constraints,
            issued,
            batch: batch.max(1),
        }
    }

    /// Marks constraint `i` as already present in the master problem.
    pub fn mark_issued(&mut self, i: usize) {
        self.issued[i] = true;
    }
}

impl ConstraintOracle for ExplicitOracle {
    fn violated(&mut self, x: &[f64], tol: f64) -> Vec<Constraint> {
        let mut hits: Vec<(usize, f64)> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.issued[*i])
            .map(|(i, c)| (i, c.violation(x)))
            .filter(|&(_, v)| v > tol)
            .collect();
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(self.batch);
        hits.into_iter()
            .map(|(i, _)| {
                self.issued[i] = true;
                self.constraints[i].clone()
            })
            .collect()
    }
}

/// Solves the implicit problem "`p` plus every constraint the oracle knows".
///
/// Starting from `p`, the master LP is re-solved with the oracle's cuts
/// added until the oracle finds nothing violated. If a relaxation is
/// unbounded, a large temporary box is imposed; a final optimum touching
/// the box is reported as unbounded. Duals refer to the constraints of `p`
/// followed by the generated cuts in issue order.
pub fn solve_lp_with_generation(
    p: &LpProblem,
    oracle: &mut dyn ConstraintOracle,
    opts: &SolveOptions,
) -> Result<LpSolution> {
    let mut work = p.clone();
    let mut box_rows: Option<std::ops::Range<usize>> = None;
    let mut iterations = 0;
    for _ in 0..MAX_ROUNDS {
        let mut sol = solve_lp(&work, opts)?;
        iterations += sol.iterations;
        debug!(
            "generation round: {} rows, {:?} after {} pivots",
            work.constraints.len(),
            sol.status,
            sol.iterations
        );
        match sol.status {
            LpStatus::Infeasible => {
                sol.iterations = iterations;
                return Ok(sol);
            }
            LpStatus::Unbounded => {
                if box_rows.is_some() {
                    sol.iterations = iterations;
                    return Ok(sol);
                }
                let start = work.constraints.len();
                let n = work.n_vars();
                for j in 0..n {
                    let mut up = vec![0.0; n];
                    up[j] = 1.0;
                    work.add_le(up, BOX);
                    if work.lower_bounds[j] == f64::NEG_INFINITY {
                        let mut down = vec![0.0; n];
                        down[j] = -1.0;
                        work.add_le(down, BOX);
                    }
                }
                box_rows = Some(start..work.constraints.len());
            }
            LpStatus::Optimal => {
                let cuts = oracle.violated(&sol.x, opts.feas_tol);
                if cuts.is_empty() {
                    sol.iterations = iterations;
                    if let Some(range) = box_rows {
                        if sol.x.iter().any(|v| v.abs() >= 0.5 * BOX) {
                            sol.status = LpStatus::Unbounded;
                            sol.objective_value = f64::NEG_INFINITY;
                            sol.duals.clear();
                            return Ok(sol);
                        }
                        sol.duals = sol
                            .duals
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| !range.contains(i))
                            .map(|(_, &d)| d)
                            .collect();
                    }
                    return Ok(sol);
                }
                for c in cuts {
                    if c.coeffs.len() != work.n_vars() {
                        return Err(Error::Dimension {
                            what: "generated constraint",
                            expected: work.n_vars(),
                            got: c.coeffs.len(),
                        });
                    }
                    work.constraints.push(c);
                }
            }
        }
    }
    Err(Error::IterationLimit(MAX_ROUNDS))
}
