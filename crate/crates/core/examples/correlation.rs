//! Rank correlation between the all-click torontonian, |Haf|^2 and the
//! density of random sampling blocks.
//!
//! Usage: `correlation [n_matrices] [seed]`

use gbs_core::bench::correlation_study;

fn main() -> gbs_core::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let r = correlation_study(n, seed)?;
    println!("{n} matrices");
    println!("spearman(Tor, |Haf|^2) = {:.3}  (z = {:.2})", r.spearman_tor_haf, r.z_tor_haf);
    println!("spearman(Tor, density) = {:.3}  (z = {:.2})", r.spearman_tor_density, r.z_tor_density);
    Ok(())
}
