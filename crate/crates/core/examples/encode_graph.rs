//! Encode a graph into a lossless device and check the round trip.
//!
//! Usage: `encode_graph [mean_clicks] [seed]`

use gbs_core::encoding::{expected_clicks_at_scale, spectral_radius};
use gbs_core::instances::planted_clique;
use gbs_core::{choose_scale, encode_graph, C64};

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let target: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);

    let inst = planted_clique(12, 4, 0.2, seed)?;
    let g = inst.graph;
    let c = choose_scale(&g, target)?;
    println!("spectral radius {:.4}, scale {c:.6} (c * radius = {:.4})", spectral_radius(&g)?, c * spectral_radius(&g)?);

    let device = encode_graph(&g, c)?;
    println!("squeezing: {:?}", device.squeezing.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>());

    let state = device.state()?;
    let a = state.sampling_matrix()?.a;
    let err = a.relative_distance(&g.adjacency().scale(C64::new(c, 0.0)));
    println!("|A - c*Delta| / |c*Delta| = {err:.2e}");
    println!("mean clicks {:.6} (target {target}), mean photons {:.4}", expected_clicks_at_scale(&g, c)?, state.mean_photon_number());
    Ok(())
}
