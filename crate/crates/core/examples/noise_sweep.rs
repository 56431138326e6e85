//! Loss and thermal-noise sweep: how quickly
//! pool-fed random search reaches the uniform-search target.
//!
//! Usage: `noise_sweep [density|max-haf] [planted|complex|zero-one] [matched|fixed] [seed]`

use gbs_core::bench::{noise_sweep, NoiseSweepConfig};
use gbs_core::instances::{planted_clique, random_complex, zero_one};
use gbs_core::solvers::ObjectiveKind;

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let objective = match args.get(1).map(String::as_str) {
        Some("max-haf") => ObjectiveKind::MaxHaf,
        _ => ObjectiveKind::Density,
    };
    let match_clicks = args.get(3).map(String::as_str) != Some("fixed");
    let seed: u64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(7);
    let graph = match args.get(2).map(String::as_str) {
        Some("complex") => random_complex(16, seed)?,
        Some("zero-one") => zero_one(16, 0.5, seed)?,
        _ => {
            let inst = planted_clique(16, 6, 0.2, seed)?;
            println!("planted clique {:?}", inst.clique);
            inst.graph
        }
    };
    let cfg = NoiseSweepConfig {
        objective,
        k: 6,
        eta_grid: vec![1.0, 0.75, 0.5],
        epsilon_grid: vec![0.0, 0.25, 0.5],
        max_draws: 400_000,
        target_steps: 100,
        target_trials: 200,
        budget: 1000,
        trials: 200,
        seed: 1,
        match_clicks,
    };
    let t = std::time::Instant::now();
    let report = noise_sweep(&graph, &cfg)?;
    println!("target {:.4} ({:.1?})", report.target, t.elapsed());
    println!("{:>5} {:>5} {:>7} {:>8} {:>19} {:>8} {:>6} {:>7}", "eta", "eps", "scale", "p_hat", "ci95", "censored", "used", "draws");
    for p in &report.points {
        let ci = match (p.ci95_lo, p.ci95_hi) {
            (Some(lo), Some(hi)) => format!("[{lo:.4}, {hi:.4}]"),
            _ => "-".into(),
        };
        let p_hat = p.p_hat.map(|x| format!("{x:.4}")).unwrap_or_else(|| "none".into());
        println!(
            "{:>5} {:>5} {:>7.4} {:>8} {:>19} {:>8} {:>6} {:>7}",
            p.eta, p.epsilon, p.scale, p_hat, ci, p.censored, p.patterns_used, p.draws
        );
    }
    Ok(())
}
