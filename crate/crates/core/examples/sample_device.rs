//! Draw click patterns from a noisy encoded device and compare the empirical
//! click-number histogram with the exact marginals.
//!
//! Usage: `sample_device [count] [eta] [epsilon]`

use gbs_core::instances::random_complex;
use gbs_core::sampler::{postselect, sample};
use gbs_core::{choose_scale, encode_graph, NoiseConfig};

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let count: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let eta: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.8);
    let epsilon: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.1);

    let g = random_complex(10, 5)?;
    let lossless = encode_graph(&g, choose_scale(&g, 4.0)?)?.state()?;
    let state = NoiseConfig::new(eta, epsilon)?.apply(&lossless)?;
    println!("exact mean clicks: lossless {:.3}, noisy {:.3}", lossless.expected_clicks(), state.expected_clicks());

    let t = std::time::Instant::now();
    let pool = sample(&state, count, 11)?;
    println!("{count} samples in {:.1?}, empirical mean clicks {:.3}", t.elapsed(), pool.mean_clicks());

    for (k, n) in pool.click_histogram().iter().enumerate().filter(|(_, &n)| n > 0) {
        println!("{k:>3} clicks {:>6}  {}", n, "#".repeat(60 * n / count));
    }
    let four = postselect(&pool, 4)?;
    println!("post-selected to 4 clicks: {} patterns, first {:?}", four.len(), four.samples.first().map(|p| p.clicked()));
    Ok(())
}
