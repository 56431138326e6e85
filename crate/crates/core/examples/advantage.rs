//! Score and speed advantage of pool-fed over uniform random search across
//! post-selection click numbers.
//!
//! Usage: `advantage [density|max-haf] [seed]`

use gbs_core::bench::{advantage_csv, advantage_study, AdvantageConfig};
use gbs_core::instances::planted_clique;
use gbs_core::solvers::ObjectiveKind;

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let objective: ObjectiveKind = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(ObjectiveKind::Density);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);

    let graph = planted_clique(16, 6, 0.2, seed)?.graph;
    let cfg = AdvantageConfig {
        objective,
        k_values: vec![4, 6, 8],
        pool_size: 1000,
        max_draws: 1_000_000,
        steps: 200,
        trials: 100,
        seed,
    };
    print!("{}", advantage_csv(&advantage_study(&graph, &cfg)?));
    Ok(())
}
