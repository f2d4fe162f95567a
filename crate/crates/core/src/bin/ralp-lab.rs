use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ralp::bounds::{
    best_weighted_approx, construct_wbar, estimate_deltas, lyapunov_beta, theorem1_bound, weighted_l1_norm,
    BoundTerms, WitnessKey,
};
use ralp::experiment::{emit_outputs, run_experiment_with, ExperimentConfig, ExperimentContext, Panel, DESK_TRIALS, PAPER_TRIALS};
use ralp::features::{build_dictionary, Normalization, ROOM_VARIANCES};
use ralp::mdp::{optimal_values, write_mdp};
use ralp::ralp::{approximate_values, solve_ralp, RalpConfig};
use ralp::room::build_room_domain;
use ralp::sampling::{draw_samples, exhaustive_samples, SamplingPlan};
use ralp::{Distribution, Error, LyapunovSpec, Result, Variant, Weights};

#[derive(Parser)]
#[command(name = "ralp-lab", version, about = "Regularized approximate LP experiments on the room domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the five comparisons and write CSV, heatmap and manifest.
    Run(RunArgs),
    /// Evaluate the approximation-error bound for one sampled RALP.
    Bound(BoundArgs),
    /// Write the room MDP and its coordinate table.
    Domain(DomainArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    panel: Panel,
    /// Trials per side (default 50, or 500 with --full).
    #[arg(long)]
    trials: Option<usize>,
    /// Use the published 500 trials per side.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Scale each feature column to unit L1 mass over the grid.
    #[arg(long)]
    normalize_features: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value = "stable")]
    domain: Variant,
    #[arg(long)]
    psi: f64,
    #[arg(long, conflicts_with = "exhaustive", required_unless_present = "exhaustive")]
    samples: Option<usize>,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DomainArgs {
    /// Write the files (otherwise only a summary is printed).
    #[arg(long)]
    emit: bool,
    #[arg(long, default_value = "stable")]
    variant: Variant,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::panel(args.panel);
    cfg.trials = args.trials.unwrap_or(if args.full { PAPER_TRIALS } else { DESK_TRIALS });
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(psi) = args.psi {
        cfg.psi = psi;
    }
    if let Some(n) = args.samples {
        cfg.n_samples = n;
    }
    if args.normalize_features {
        cfg.normalization = Normalization::UnitL1;
    }
    cfg.validate()?;
    let ctx = ExperimentContext::new(&cfg.zeta)?;
    let result = run_experiment_with(&ctx, &cfg)?;
    let files = emit_outputs(&result, &ctx, &args.out)?;
    let summary = result.summary(&ctx);
    println!("panel {}: {}", args.panel, args.panel.caption());
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serialises"));
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn bound(args: BoundArgs) -> Result<()> {
    let domain = build_room_domain(args.domain);
    let mdp = &domain.mdp;
    let coords = domain.feature_coords();
    let samples = if args.exhaustive {
        exhaustive_samples(mdp)
    } else {
        let n = args.samples.expect("clap enforces --samples or --exhaustive");
        draw_samples(mdp, &SamplingPlan::new(Distribution::uniform(mdp.n_states()), n, args.seed))?
    };
    let mut centers_idx = samples.states();
    centers_idx.sort_unstable();
    centers_idx.dedup();
    let centers: Vec<[f64; 2]> = centers_idx.iter().map(|&s| coords[s]).collect();
    let dict = build_dictionary(&centers, &ROOM_VARIANCES, Normalization::None, &coords)?;
    let v_star = optimal_values(mdp)?;
    let all: Vec<usize> = (0..mdp.n_states()).collect();

    let cfg = RalpConfig::new(args.psi, mdp.gamma()).with_generation(256);
    let w = solve_ralp(&samples, &dict, &coords, &cfg)?;
    let approx = approximate_values(&dict, &w, &coords, &all)?;
    let diff: Vec<f64> = v_star.iter().zip(approx.iter()).map(|(a, b)| a - b).collect();
    let rho = Distribution::uniform(mdp.n_states());
    let realized = weighted_l1_norm(rho.mass(), &diff)?;

    let w_l = Weights::bias_only(dict.n_columns(), 1.0);
    let mut spec = LyapunovSpec::new(vec![1.0; mdp.n_states()], vec![])?;
    let beta = lyapunov_beta(mdp, &mut spec)?;
    let fit = best_weighted_approx(&v_star, &dict, &coords, args.psi, &spec.values, &cfg.solver)?;
    let wbar = construct_wbar(&fit.weights, fit.error, beta, &w_l)?;
    let deltas = estimate_deltas(mdp, &dict, &coords, &samples, WitnessKey::FeatureDistance)?;
    let mut report = theorem1_bound(
        &rho,
        &dict,
        &coords,
        &w_l,
        BoundTerms {
            beta,
            min_err: fit.error,
            deltas,
            psi: args.psi,
            gamma: mdp.gamma(),
            wbar_in_w: wbar.l1_without_bias <= args.psi + ralp::bounds::BUDGET_TOL,
        },
    )?;
    report.realized_error = Some(realized);
    println!("{}", report.to_json());
    Ok(())
}

fn domain(args: DomainArgs) -> Result<()> {
    let d = build_room_domain(args.variant);
    println!(
        "room {}x{} ({:?}): {} states, {} allowed state-action pairs, gamma {}",
        d.size,
        d.size,
        d.variant,
        d.n_states(),
        d.mdp.n_allowed_pairs(),
        d.mdp.gamma()
    );
    if !args.emit {
        return Ok(());
    }
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let name = match args.variant {
        Variant::Free => "room_free",
        Variant::Stable => "room_stable",
    };
    let mdp_path = args.out.join(format!("{name}.mdp"));
    std::fs::write(&mdp_path, write_mdp(&d.mdp)).map_err(|e| Error::io(&mdp_path, e))?;
    let coords_path = args.out.join("room_coords.csv");
    std::fs::write(&coords_path, d.coords_csv()).map_err(|e| Error::io(&coords_path, e))?;
    println!("wrote {}\nwrote {}", mdp_path.display(), coords_path.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Bound(a) => bound(a),
        Command::Domain(a) => domain(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ralp-lab: {e}");
            ExitCode::FAILURE
        }
    }
}
