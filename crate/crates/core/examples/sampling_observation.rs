//! Uniform samples weighted by mu versus samples drawn from mu: both
//! estimate the same mu-weighted objective term.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ralp::experiment::{VariantData, ZetaConfig};
use ralp::features::ROOM_VARIANCES;
use ralp::room::Variant;
use ralp::sampling::observation1_check;
use ralp::{FeatureDictionary, Weights};

fn main() -> ralp::Result<()> {
    let data = VariantData::new(Variant::Stable, &ZetaConfig::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let centers: Vec<[f64; 2]> = (0..10).map(|_| data.coords[rng.gen_range(0..data.coords.len())]).collect();
    let dict = FeatureDictionary::new(centers, ROOM_VARIANCES.to_vec())?;
    let w = Weights {
        w: (0..dict.n_columns()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    for n in [5, 20, 80] {
        let e = observation1_check(&data.domain.mdp, &dict, &data.coords, &data.zeta, &w, n, 1000, 17)?;
        println!(
            "n={n:>2}: exact {:.4} | uniform x mu|S| {:.4} (se {:.4}) | mu-sampled {:.4} (se {:.4}) | within 3 se: {}",
            e.exact,
            e.uniform_weighted,
            e.uniform_weighted_se,
            e.mu_sampled,
            e.mu_sampled_se,
            e.within(3.0)
        );
    }
    Ok(())
}
