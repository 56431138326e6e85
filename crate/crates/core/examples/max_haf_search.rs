//! Max-Haf search on a random complex graph: compare how pool-fed and uniform
//! random search improve with the step count.
//!
//! Usage: `max_haf_search [k] [trials] [seed]`

use gbs_core::bench::search_trials;
use gbs_core::instances::{exhaustive_best, random_complex};
use gbs_core::sampler::sample_postselected;
use gbs_core::solvers::{Objective, ObjectiveKind, ProposalSource};
use gbs_core::stats::mean;
use gbs_core::{choose_scale, encode_graph};

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let k: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let trials: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);

    let g = random_complex(14, seed)?;
    let obj = Objective::new(ObjectiveKind::MaxHaf, g.clone(), k)?;
    let (argmax, optimum) = exhaustive_best(g.n(), k, |s| obj.value(s))?;
    println!("optimum |Haf|^2 = {optimum:.4} at {argmax:?}");

    let state = encode_graph(&g, choose_scale(&g, k as f64)?)?.state()?;
    let pool = sample_postselected(&state, k, 2000, 2_000_000, seed)?.pool;
    let enhanced = search_trials(&obj, &ProposalSource::pool(pool, k)?, 400, trials, 10)?;
    let uniform = search_trials(&obj, &ProposalSource::Uniform, 400, trials, 20)?;

    println!("{:>6} {:>10} {:>10}", "step", "pool", "uniform");
    for step in [1, 10, 50, 100, 200, 400] {
        let at = |runs: &[gbs_core::solvers::RunTrace]| mean(&runs.iter().map(|r| r.best_at(step)).collect::<Vec<_>>());
        println!("{step:>6} {:>10.4} {:>10.4}", at(&enhanced), at(&uniform));
    }
    Ok(())
}
