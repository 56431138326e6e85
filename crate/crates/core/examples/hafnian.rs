//! Exact hafnians and torontonians on small matrices.
//!
//! Usage: `hafnian [n]` (even, default 8)

use gbs_core::gaussian::GaussianState;
use gbs_core::matfn::{hafnian, hafnian_pairing, hafnian_power_trace, torontonian};
use gbs_core::{ComplexMatrix, C64};

fn main() -> gbs_core::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);

    // All-ones matrix: every perfect matching contributes 1, so the hafnian is (n-1)!!.
    let ones = ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0));
    println!("haf(J_{n}) = {}", hafnian(&ones)?.re);

    let a = ComplexMatrix::from_fn(n, n, |i, j| C64::new(((i + j) as f64).cos(), (i as f64 - j as f64).abs().sin()));
    println!("pairing recursion  {:.12}", hafnian_pairing(&a));
    println!("power trace        {:.12}", hafnian_power_trace(&a));

    // Torontonian of a pure state built from a scaled copy of `a`: the probability
    // (up to the vacuum normalization) that every detector clicks.
    let norm = gbs_core::numerics::takagi(&a)?.max_value();
    let block = a.scale(C64::new(0.8 / norm, 0.0));
    let state = GaussianState::from_pure_sampling(&block)?;
    let tor = torontonian(&state.o_matrix()?)?;
    println!("Tor(O) = {tor:.6e}, all-click probability = {:.6e}", tor / state.husimi_det()?.sqrt());
    Ok(())
}
