//! Value iteration and the greedy policy on a three-state chain.

use ralp::mdp::{bellman_max, greedy_policy, value_iteration, DEFAULT_VI_MAX_ITER};
use ralp::TabularMdp;

fn main() -> ralp::Result<()> {
    // Action 0 stays put, action 1 moves right; state 2 pays 1 per step.
    let stay_or_move = |s: usize| vec![vec![(s, 1.0)], vec![((s + 1).min(2), 1.0)]];
    let probs: Vec<Vec<Vec<(usize, f64)>>> = (0..3).map(stay_or_move).collect();
    let transitions = probs.into_iter().flatten().collect();
    let mdp = TabularMdp::new(3, 2, transitions, vec![0.0, 0.0, 1.0], 0.9, vec![true; 6])?;

    let v = value_iteration(&mdp, 1e-12, DEFAULT_VI_MAX_ITER)?;
    let residual = bellman_max(&mdp, &v)?.max_abs_diff(&v);
    let policy = greedy_policy(&mdp, &v)?;
    for s in 0..3 {
        println!("V*({s}) = {:.6}  action {:?}", v[s], policy.deterministic_action(s));
    }
    println!("Bellman residual {residual:.2e}");
    Ok(())
}
