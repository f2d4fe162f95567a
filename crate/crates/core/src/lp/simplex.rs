//! Two-phase dense tableau simplex.
//!
//! Bounded variables are shifted to their lower bounds and free variables
//! keep one column that may enter in either direction and never leaves the
//! basis. Each row gets a slack, and rows with a negative right-hand side are
//! negated and given an artificial. Phase 1 minimises
//! the artificials; phase 2 the true objective. Pivoting starts with
//! steepest-edge pricing and a Harris ratio test, and falls back to Bland's
//! rule after a run of degenerate pivots, which rules out cycling. The
//! tableau is periodically rebuilt from the original rows and the current
//! basis, and always before a phase reports optimality or unboundedness.

use super::{LpProblem, LpSolution, LpStatus, SolveOptions};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const HARRIS_TOL: f64 = 1e-9;
/// Matrix entries at or below this magnitude are treated as zero.
const SMALL_ENTRY: f64 = 1e-11;
/// Pivots smaller than this fraction of their column's largest entry are
/// avoided while another improving column has an acceptable one.
const REL_PIVOT_TOL: f64 = 1e-7;
/// Minimum pivots between scheduled refactorizations.
const REFACTOR_MIN: usize = 64;

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Shifted { col: usize, lower: f64 },
    Free { col: usize },
}

struct Tableau {
    rows: usize,
    /// Columns excluding the right-hand side.
    cols: usize,
    width: usize,
    data: Vec<f64>,
    /// The initial tableau, which refactorization solves against.
    original: Vec<f64>,
    basis: Vec<usize>,
    /// Free columns, and which of them currently stand for the negated variable.
    free: Vec<bool>,
    flipped: Vec<bool>,
    /// Phase-1 and phase-2 reduced-cost rows; the last entry holds `-z`.
    cost1: Vec<f64>,
    cost2: Vec<f64>,
    /// Objective coefficients of each phase, for rebuilding the cost rows.
    objective1: Vec<f64>,
    objective2: Vec<f64>,
    art_start: usize,
    iterations: usize,
    since_refactor: usize,
    bland: bool,
    degenerate_run: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Solves `p` to optimality, or certifies infeasibility or unboundedness.
pub fn solve_lp(p: &LpProblem, opts: &SolveOptions) -> Result<LpSolution> {
    p.validate()?;
    let n = p.n_vars();
    let m = p.constraints.len();

    let mut maps = Vec::with_capacity(n);
    let mut n_struct = 0;
    for &l in &p.lower_bounds {
        if l == f64::NEG_INFINITY {
            maps.push(VarMap::Free { col: n_struct });
        } else {
            maps.push(VarMap::Shifted {
                col: n_struct,
                lower: l,
            });
        }
        n_struct += 1;
    }

    let mut rhs: Vec<f64> = p
        .constraints
        .iter()
        .map(|c| {
            let shift: f64 = maps
                .iter()
                .zip(&c.coeffs)
                .map(|(map, a)| match *map {
                    VarMap::Shifted { lower, .. } => a * lower,
                    VarMap::Free { .. } => 0.0,
                })
                .sum();
            c.bound - shift
        })
        .collect();
    let negated: Vec<bool> = rhs.iter().map(|&b| b < 0.0).collect();
    let n_art = negated.iter().filter(|&&b| b).count();

    let slack_start = n_struct;
    let art_start = n_struct + m;
    let cols = art_start + n_art;
    let width = cols + 1;
    let mut data = vec![0.0; m * width];
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art_start;
    for (i, c) in p.constraints.iter().enumerate() {
        let sign = if negated[i] { -1.0 } else { 1.0 };
        let row = &mut data[i * width..(i + 1) * width];
        for (map, &a) in maps.iter().zip(&c.coeffs) {
            let (VarMap::Shifted { col, .. } | VarMap::Free { col }) = *map;
            if a.abs() > SMALL_ENTRY {
                row[col] = sign * a;
            }
        }
        row[slack_start + i] = sign;
        if negated[i] {
            rhs[i] = -rhs[i];
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack_start + i);
        }
        row[cols] = rhs[i];
    }

    let mut cost2 = vec![0.0; width];
    let mut free = vec![false; cols];
    for (map, &c) in maps.iter().zip(&p.objective) {
        let (VarMap::Shifted { col, .. } | VarMap::Free { col }) = *map;
        cost2[col] = c;
        free[col] = matches!(map, VarMap::Free { .. });
    }
    let mut objective1 = vec![0.0; width];
    objective1[art_start..cols].iter_mut().for_each(|c| *c = 1.0);
    let mut cost1 = vec![0.0; width];
    for (i, &b) in basis.iter().enumerate() {
        if b >= art_start {
            cost1[b] = 1.0;
            let row = &data[i * width..(i + 1) * width];
            for (c, r) in cost1.iter_mut().zip(row) {
                *c -= r;
            }
        }
    }

    let mut t = Tableau {
        rows: m,
        cols,
        width,
        original: data.clone(),
        data,
        basis,
        flipped: vec![false; cols],
        free,
        objective1,
        objective2: cost2.clone(),
        cost1,
        cost2,
        art_start,
        iterations: 0,
        since_refactor: 0,
        bland: false,
        degenerate_run: 0,
    };

    if n_art > 0 {
        t.run_phase(1, opts)?;
        let worst_art = (0..m)
            .filter(|&i| t.basis[i] >= art_start)
            .map(|i| t.rhs(i))
            .fold(0.0, f64::max);
        if worst_art > opts.feas_tol {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective_value: f64::NAN,
                duals: Vec::new(),
                iterations: t.iterations,
            });
        }
        t.drive_out_artificials();
    }
    t.bland = false;
    t.degenerate_run = 0;

    let outcome = t.run_phase(2, opts)?;
    let mut y = vec![0.0; n_struct];
    for i in 0..m {
        let j = t.basis[i];
        if j < n_struct {
            y[j] = if t.free[j] { t.rhs(i) } else { t.rhs(i).max(0.0) };
        }
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, lower } => lower + y[col],
            VarMap::Free { col } => {
                if t.flipped[col] {
                    -y[col]
                } else {
                    y[col]
                }
            }
        })
        .collect();

    match outcome {
        PhaseOutcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective_value: f64::NEG_INFINITY,
            x,
            duals: Vec::new(),
            iterations: t.iterations,
        }),
        PhaseOutcome::Optimal => {
            let duals = (0..m).map(|i| t.cost2[slack_start + i].max(0.0)).collect();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective_value: p.objective_at(&x),
                x,
                duals,
                iterations: t.iterations,
            })
        }
    }
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.cols]
    }

    fn run_phase(&mut self, phase: u8, opts: &SolveOptions) -> Result<PhaseOutcome> {
        let eligible = if phase == 1 { self.cols } else { self.art_start };
        // Columns whose pivot was too small relative to the column this
        // iteration, and the best of those pivots as a fallback.
        let mut rejected = vec![false; eligible];
        let mut fallback: Option<(usize, usize, f64, f64)> = None;
        loop {
            let cost = if phase == 1 { &self.cost1 } else { &self.cost2 };
            let usable = |j: usize| !rejected[j] && self.improving(cost[j], j, opts.opt_tol);
            let entering = if self.bland {
                (0..eligible).find(|&j| usable(j))
            } else {
                self.steepest_edge(cost, eligible, usable)
            };
            let (e, r, step) = match entering {
                Some(e) => {
                    if cost[e] > 0.0 {
                        self.flip(e);
                    }
                    let Some((r, step)) = self.ratio_test(e) else {
                        if self.since_refactor > 0 && self.refactor() {
                            rejected.iter_mut().for_each(|x| *x = false);
                            fallback = None;
                            continue;
                        }
                        return Ok(PhaseOutcome::Unbounded);
                    };
                    let pivot = self.data[r * self.width + e];
                    let largest = (0..self.rows)
                        .map(|i| self.data[i * self.width + e].abs())
                        .fold(0.0, f64::max);
                    let relative = pivot / largest;
                    if relative < REL_PIVOT_TOL {
                        rejected[e] = true;
                        if fallback.is_none_or(|f| relative > f.3) {
                            fallback = Some((e, r, step, relative));
                        }
                        continue;
                    }
                    (e, r, step)
                }
                None => match fallback {
                    Some((e, r, step, _)) => (e, r, step),
                    None => {
                        if self.since_refactor > 0 && self.refactor() {
                            continue;
                        }
                        return Ok(PhaseOutcome::Optimal);
                    }
                },
            };
            rejected.iter_mut().for_each(|x| *x = false);
            fallback = None;

            if step <= DEGENERATE_STEP {
                self.degenerate_run += 1;
                if self.degenerate_run > opts.bland_after {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }

            self.iterations += 1;
            if self.iterations > opts.max_iter {
                return Err(Error::IterationLimit(opts.max_iter));
            }
            self.pivot(r, e);
            self.since_refactor += 1;
            if self.since_refactor >= REFACTOR_MIN.max(self.rows) {
                self.refactor();
            }
        }
    }

    /// Rebuilds the tableau as `B⁻¹[A | b]` from the original rows and the
    /// current basis, with fresh reduced costs. Leaves the tableau untouched
    /// and returns false if the basis matrix is numerically singular.
    fn refactor(&mut self) -> bool {
        let (m, w) = (self.rows, self.width);
        let mut b: Vec<f64> = Vec::with_capacity(m * m);
        for i in 0..m {
            let row = &self.original[i * w..(i + 1) * w];
            b.extend(self.basis.iter().map(|&j| row[j]));
        }
        let mut x = self.original.clone();
        let mut col_of_row: Vec<usize> = (0..m).collect();
        // Gaussian elimination with partial pivoting on B, mirrored on x.
        for k in 0..m {
            let Some(p) = (k..m).max_by(|&i, &j| b[i * m + k].abs().total_cmp(&b[j * m + k].abs())) else {
                return false;
            };
            if !(b[p * m + k].abs() > 1e-13) {
                return false;
            }
            if p != k {
                for j in 0..m {
                    b.swap(k * m + j, p * m + j);
                }
                for j in 0..w {
                    x.swap(k * w + j, p * w + j);
                }
            }
            let inv = 1.0 / b[k * m + k];
            for i in k + 1..m {
                let f = b[i * m + k] * inv;
                if f == 0.0 {
                    continue;
                }
                for j in k..m {
                    b[i * m + j] -= f * b[k * m + j];
                }
                let (upper, lower) = x.split_at_mut(i * w);
                for (t, s) in lower[..w].iter_mut().zip(&upper[k * w..(k + 1) * w]) {
                    *t -= f * s;
                }
            }
        }
        for k in (0..m).rev() {
            let inv = 1.0 / b[k * m + k];
            let (upper, lower) = x.split_at_mut((k + 1) * w);
            let row_k = &mut upper[k * w..];
            for i in k + 1..m {
                let f = b[k * m + i];
                if f != 0.0 {
                    for (t, s) in row_k.iter_mut().zip(&lower[(i - k - 1) * w..(i - k) * w]) {
                        *t -= f * s;
                    }
                }
            }
            row_k.iter_mut().for_each(|v| *v *= inv);
            col_of_row[k] = self.basis[k];
        }
        for (i, &j) in col_of_row.iter().enumerate() {
            for r in 0..m {
                x[r * w + j] = if r == i { 1.0 } else { 0.0 };
            }
        }
        self.data = x;
        self.cost1 = self.reduced_costs(&self.objective1);
        self.cost2 = self.reduced_costs(&self.objective2);
        self.since_refactor = 0;
        true
    }

    /// `c − c_Bᵀ(B⁻¹[A | b])`; the last entry is `−z`.
    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let mut out = c.to_vec();
        out[self.cols] = 0.0;
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = c[j];
            if cb != 0.0 {
                let row = &self.data[i * self.width..(i + 1) * self.width];
                for (o, v) in out.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
        for &j in &self.basis {
            out[j] = 0.0;
        }
        out
    }

    /// Entering column by exact steepest-edge pricing: the most negative
    /// reduced cost per unit length of the edge direction `(1, −B⁻¹a_j)`.
    fn steepest_edge(&self, cost: &[f64], eligible: usize, usable: impl Fn(usize) -> bool) -> Option<usize> {
        let improving: Vec<usize> = (0..eligible).filter(|&j| usable(j)).collect();
        if improving.len() <= 1 {
            return improving.first().copied();
        }
        let mut norms = vec![1.0; improving.len()];
        for i in 0..self.rows {
            let row = &self.data[i * self.width..(i + 1) * self.width];
            for (n, &j) in norms.iter_mut().zip(&improving) {
                let a = row[j];
                *n += a * a;
            }
        }
        improving
            .iter()
            .zip(&norms)
            .map(|(&j, &n)| (j, -cost[j].abs() / n.sqrt()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j)
    }

    /// Whether nonbasic column `j` with reduced cost `d` can improve the
    /// objective: by increasing, or for a free column by decreasing.
    fn improving(&self, d: f64, j: usize, opt_tol: f64) -> bool {
        d < -opt_tol || (self.free[j] && d > opt_tol)
    }

    /// Replaces free column `j` by its negation.
    fn flip(&mut self, j: usize) {
        for i in 0..self.rows {
            self.data[i * self.width + j] = -self.data[i * self.width + j];
            self.original[i * self.width + j] = -self.original[i * self.width + j];
        }
        for c in [&mut self.cost1, &mut self.cost2, &mut self.objective1, &mut self.objective2] {
            c[j] = -c[j];
        }
        self.flipped[j] = !self.flipped[j];
    }

    /// Leaving row for entering column `e` and the step length.
    ///
    /// Harris two-pass test: the first pass finds the largest step that keeps
    /// every basic variable above `-HARRIS_TOL`, the second picks the largest
    /// pivot among rows whose exact ratio fits under it. Under Bland's rule
    /// the exact minimum ratio with the lowest basic index is used instead.
    fn ratio_test(&self, e: usize) -> Option<(usize, f64)> {
        let col = |i: usize| self.data[i * self.width + e];
        let candidates = (0..self.rows).filter(|&i| col(i) > PIVOT_TOL && !self.is_free_basic(i));
        if self.bland {
            let mut best: Option<(usize, f64)> = None;
            for i in candidates {
                let ratio = self.rhs(i).max(0.0) / col(i);
                best = match best {
                    Some((bi, br))
                        if ratio > br + DEGENERATE_STEP * (1.0 + br.abs())
                            || ((ratio - br).abs() <= DEGENERATE_STEP * (1.0 + br.abs())
                                && self.basis[i] > self.basis[bi]) =>
                    {
                        Some((bi, br))
                    }
                    _ => Some((i, ratio)),
                };
            }
            return best;
        }
        let bound = candidates
            .clone()
            .map(|i| (self.rhs(i).max(0.0) + HARRIS_TOL) / col(i))
            .fold(f64::INFINITY, f64::min);
        if bound == f64::INFINITY {
            return None;
        }
        candidates
            .map(|i| (i, self.rhs(i).max(0.0) / col(i), col(i)))
            .filter(|&(_, ratio, _)| ratio <= bound)
            .max_by(|a, b| a.2.total_cmp(&b.2))
            .map(|(i, ratio, _)| (i, ratio))
    }

    fn is_free_basic(&self, i: usize) -> bool {
        let j = self.basis[i];
        j < self.free.len() && self.free[j]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width;
        let piv = self.data[r * w + e];
        let inv = 1.0 / piv;
        {
            let row = &mut self.data[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[e] = 1.0;
        }
        let nz: Vec<usize> = (0..w).filter(|&j| self.data[r * w + j] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&j| self.data[r * w + j]).collect();

        let eliminate = |row: &mut [f64]| {
            let f = row[e];
            if f != 0.0 {
                for (&j, &pv) in nz.iter().zip(&pivot_row) {
                    row[j] -= f * pv;
                }
                row[e] = 0.0;
            }
        };
        for i in 0..self.rows {
            if i != r {
                eliminate(&mut self.data[i * w..(i + 1) * w]);
            }
        }
        eliminate(&mut self.cost1);
        eliminate(&mut self.cost2);
        self.basis[r] = e;
    }

    /// Pivots zero-valued artificials out of the basis after phase 1. Rows
    /// with no usable pivot are redundant and keep their artificial at zero.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] < self.art_start {
                continue;
            }
            let row = &self.data[r * self.width..r * self.width + self.art_start];
            let candidate = row
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > PIVOT_TOL)
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(j, _)| j);
            if let Some(j) = candidate {
                self.pivot(r, j);
            }
        }
    }
}
