//! A short run of one room-domain comparison, written to a temporary
//! directory. Pass a panel letter (default `a`) and a trial count (default 10).

use ralp::experiment::{emit_outputs, run_experiment_with, ExperimentConfig, ExperimentContext, Panel, ZetaConfig};

fn main() -> ralp::Result<()> {
    let mut args = std::env::args().skip(1);
    let panel: Panel = args.next().as_deref().unwrap_or("a").parse()?;
    let trials: usize = args.next().and_then(|t| t.parse().ok()).unwrap_or(10);

    let cfg = ExperimentConfig::panel(panel).with_trials(trials);
    let ctx = ExperimentContext::new(&ZetaConfig::default())?;
    let result = run_experiment_with(&ctx, &cfg)?;
    let summary = result.summary(&ctx);
    println!("panel {panel}: {}", panel.caption());
    println!("{summary:#?}");

    let out = std::env::temp_dir().join(format!("ralp-panel-{}", panel.letter()));
    for f in emit_outputs(&result, &ctx, &out)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
