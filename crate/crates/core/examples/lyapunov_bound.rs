//! The approximation-error bound with every state-action pair sampled, next
//! to the error the RALP actually reaches.

use ralp::bounds::{
    best_weighted_approx, construct_wbar, estimate_deltas, lyapunov_beta, theorem1_bound, weighted_l1_norm,
    BoundTerms, WitnessKey, BUDGET_TOL,
};
use ralp::features::ROOM_VARIANCES;
use ralp::mdp::optimal_values;
use ralp::ralp::{approximate_values, solve_ralp};
use ralp::room::{build_room_domain, Variant};
use ralp::sampling::exhaustive_samples;
use ralp::{Distribution, FeatureDictionary, LyapunovSpec, RalpConfig, Weights};

fn main() -> ralp::Result<()> {
    let d = build_room_domain(Variant::Stable);
    let coords = d.feature_coords();
    let centers: Vec<[f64; 2]> = (0..9)
        .flat_map(|r| (0..9).map(move |c| [(1 + 3 * r) as f64, (1 + 3 * c) as f64]))
        .collect();
    let dict = FeatureDictionary::new(centers, ROOM_VARIANCES.to_vec())?;
    let samples = exhaustive_samples(&d.mdp);
    let psi = 4.0;

    let mut cfg = RalpConfig::new(psi, d.mdp.gamma()).with_generation(256);
    cfg.count_duplicates = false;
    let w = solve_ralp(&samples, &dict, &coords, &cfg)?;
    let all: Vec<usize> = (0..d.n_states()).collect();
    let v_star = optimal_values(&d.mdp)?;
    let approx = approximate_values(&dict, &w, &coords, &all)?;
    let rho = Distribution::uniform(d.n_states());
    let diff: Vec<f64> = v_star.iter().zip(approx.iter()).map(|(a, b)| a - b).collect();

    let w_l = Weights::bias_only(dict.n_columns(), 1.0);
    let mut lyap = LyapunovSpec::new(vec![1.0; d.n_states()], vec![])?;
    let beta = lyapunov_beta(&d.mdp, &mut lyap)?;
    let fit = best_weighted_approx(&v_star, &dict, &coords, psi, &lyap.values, &cfg.solver)?;
    let wbar = construct_wbar(&fit.weights, fit.error, beta, &w_l)?;
    let deltas = estimate_deltas(&d.mdp, &dict, &coords, &samples, WitnessKey::FeatureDistance)?;
    let mut report = theorem1_bound(
        &rho,
        &dict,
        &coords,
        &w_l,
        BoundTerms {
            beta,
            min_err: fit.error,
            deltas,
            psi,
            gamma: d.mdp.gamma(),
            wbar_in_w: wbar.l1_without_bias <= psi + BUDGET_TOL,
        },
    )?;
    report.realized_error = Some(weighted_l1_norm(rho.mass(), &diff)?);
    println!("{}", report.to_json());
    println!("bound holds: {:?}", report.holds());
    Ok(())
}
