//! The room gridworld: optimal values, the Manhattan Lyapunov function and
//! the visitation distribution of the optimal policy.

use ralp::bounds::lyapunov_beta;
use ralp::experiment::{VariantData, ZetaConfig};
use ralp::room::{manhattan_lyapunov, Variant};

fn main() -> ralp::Result<()> {
    let cfg = ZetaConfig {
        episodes: 2_000,
        ..ZetaConfig::default()
    };
    for variant in [Variant::Free, Variant::Stable] {
        let data = VariantData::new(variant, &cfg)?;
        let d = &data.domain;
        let mut lyap = manhattan_lyapunov(d);
        let beta = lyapunov_beta(&d.mdp, &mut lyap)?;
        println!(
            "{variant:?}: {} allowed pairs, V* in [{:.3}, {:.3}], Manhattan beta {beta:.4}",
            d.mdp.n_allowed_pairs(),
            data.v_star.iter().copied().fold(f64::INFINITY, f64::min),
            data.v_star.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
    }

    let data = VariantData::new(Variant::Stable, &cfg)?;
    println!("visitation of the optimal policy (x1000), stable room:");
    for row in 1..=data.domain.size {
        let line: Vec<String> = (1..=data.domain.size)
            .map(|col| format!("{:3.0}", 1000.0 * data.zeta.mass()[data.domain.state(row, col)]))
            .collect();
        println!("{}", line.join(""));
    }
    Ok(())
}
