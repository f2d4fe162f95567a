//! Fits a RALP on 60 uniform samples of the stable room and reports the error.

use ralp::bounds::weighted_l1_norm;
use ralp::features::{build_dictionary, ROOM_VARIANCES};
use ralp::mdp::optimal_values;
use ralp::ralp::{approximate_values, max_bellman_violation, solve_ralp};
use ralp::room::{build_room_domain, Variant};
use ralp::sampling::{draw_samples, SamplingPlan};
use ralp::{Distribution, Normalization, RalpConfig};

fn main() -> ralp::Result<()> {
    let d = build_room_domain(Variant::Stable);
    let coords = d.feature_coords();
    let samples = draw_samples(&d.mdp, &SamplingPlan::new(Distribution::uniform(d.n_states()), 60, 3))?;
    let mut centers: Vec<usize> = samples.states();
    centers.sort_unstable();
    centers.dedup();
    let centers: Vec<[f64; 2]> = centers.iter().map(|&s| coords[s]).collect();
    let dict = build_dictionary(&centers, &ROOM_VARIANCES, Normalization::None, &coords)?;

    let all: Vec<usize> = (0..d.n_states()).collect();
    let v_star = optimal_values(&d.mdp)?;
    for psi in [0.5, 1.5, 4.0] {
        let cfg = RalpConfig::new(psi, d.mdp.gamma());
        let w = solve_ralp(&samples, &dict, &coords, &cfg)?;
        let approx = approximate_values(&dict, &w, &coords, &all)?;
        let diff: Vec<f64> = v_star.iter().zip(approx.iter()).map(|(a, b)| a - b).collect();
        let err = weighted_l1_norm(Distribution::uniform(d.n_states()).mass(), &diff)?;
        let nonzero = w.w.iter().skip(1).filter(|x| x.abs() > 1e-9).count();
        println!(
            "psi {psi:>3}: mean |V* - Phi w| {err:.4}, {nonzero} active features of {}, bias {:.3}, worst sampled violation {:.1e}",
            dict.n_columns() - 1,
            w.bias(),
            max_bellman_violation(&samples, &dict, &coords, d.mdp.gamma(), &w)
        );
    }
    Ok(())
}
