//! Densest k-subgraph on a planted-clique instance: greedy peeling, uniform
//! random search, and annealing seeded from device samples.
//!
//! Usage: `dense_subgraph [steps] [seed]`

use gbs_core::instances::{exhaustive_best, planted_clique};
use gbs_core::sampler::sample_postselected;
use gbs_core::solvers::{
    density, greedy_peel, random_search, simulated_annealing, Objective, ObjectiveKind, ProposalSource, Schedule,
};
use gbs_core::{choose_scale, encode_graph};

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(17);
    let k = 6;

    let inst = planted_clique(16, k, 0.35, seed)?;
    let g = inst.graph;
    let (best_set, best) = exhaustive_best(16, k, |s| density(&g, s))?;
    let greedy = greedy_peel(&g, k)?;
    println!("planted {:?}, optimum {best} at {best_set:?}", inst.clique);
    println!("greedy peeling   {:>5} at {greedy:?}", density(&g, &greedy)?);

    let obj = Objective::new(ObjectiveKind::Density, g.clone(), k)?;
    let rs = random_search(&obj, &ProposalSource::Uniform, steps, 1)?;
    println!("uniform search   {:>5} at {:?}", rs.best_value(), rs.best_subset);

    let state = encode_graph(&g, choose_scale(&g, k as f64)?)?.state()?;
    let drawn = sample_postselected(&state, k, 1000, 1_000_000, 2)?;
    println!("pool of {} {k}-click patterns from {} draws", drawn.pool.len(), drawn.draws);
    let source = ProposalSource::pool(drawn.pool, k)?;
    let sa = simulated_annealing(&obj, &source, steps, Schedule::new(1.0, 0.995)?, 0.05, 3)?;
    println!("pool-fed anneal  {:>5} at {:?}", sa.best_value(), sa.best_subset);
    if let Some(step) = sa.first_step_reaching(best) {
        println!("annealing reached the optimum at step {step}");
    }
    Ok(())
}
