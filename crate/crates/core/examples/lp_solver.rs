//! The simplex solver directly, and the same problem by constraint generation.

use ralp::lp::{solve_lp, solve_lp_with_generation, Constraint, ExplicitOracle, SolveOptions};
use ralp::LpProblem;

fn main() -> ralp::Result<()> {
    // max 3x + 2y  s.t.  x + y ≤ 4, x + 3y ≤ 6, x ≤ 3, x, y ≥ 0
    let mut p = LpProblem::new(vec![-3.0, -2.0]);
    p.set_lower_bound(0, 0.0);
    p.set_lower_bound(1, 0.0);
    let rows = [(vec![1.0, 1.0], 4.0), (vec![1.0, 3.0], 6.0), (vec![1.0, 0.0], 3.0)];
    for (a, b) in &rows {
        p.add_le(a.clone(), *b);
    }
    let opts = SolveOptions::default();
    let s = solve_lp(&p, &opts)?.into_optimal()?;
    println!("direct: x = {:?}, objective {}, duals {:?}", s.x, s.objective_value, s.duals);

    let mut master = LpProblem::new(p.objective.clone());
    master.lower_bounds = p.lower_bounds.clone();
    let mut oracle = ExplicitOracle::new(rows.iter().map(|(a, b)| Constraint::new(a.clone(), *b)).collect(), 1);
    let g = solve_lp_with_generation(&master, &mut oracle, &opts)?.into_optimal()?;
    println!("generated: x = {:?}, objective {}", g.x, g.objective_value);
    println!("\n{}", p.to_lp_format());
    Ok(())
}
