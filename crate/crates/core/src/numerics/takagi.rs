//! Takagi-Autonne factorization `S = U diag(λ) Uᵀ` of complex symmetric matrices.
//!
//! For `S = X + iY` the real symmetric matrix `H = [[X, Y], [Y, -X]]` has
//! eigenvalues `±σ_i` where `σ_i` are the singular values of `S`. An
//! eigenvector `[a; b]` of `H` at `σ > 0` gives a Takagi vector `u = a + ib`
//! with `S ū = σ u`, and its partner `[-b; a]` sits at `-σ`, which makes the
//! resulting columns orthonormal over the complex field. The null space of `S`
//! has no such pairing, so its columns are picked by pivoted complex
//! Gram-Schmidt from the near-zero eigenvectors of `H`.

use super::eigen::symmetric_eigen;
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Symmetry tolerance accepted on input (relative Frobenius).
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Output of [`takagi`].
#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    pub unitary: ComplexMatrix,
    /// Nonnegative, sorted descending.
    pub values: Vec<f64>,
}

impl TakagiFactorization {
    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let u = &self.unitary;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| u[(i, k)] * u[(j, k)] * self.values[k]).sum()
        })
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub fn takagi(s: &ComplexMatrix) -> Result<TakagiFactorization> {
    let n = s.require_square()?;
    let asym = s.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(TakagiFactorization { unitary: ComplexMatrix::zeros(0, 0), values: vec![] });
    }
    let s = s.symmetrized();
    let m = 2 * n;
    let mut h = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = s[(i, j)];
            h[i * m + j] = z.re;
            h[i * m + j + n] = z.im;
            h[(i + n) * m + j] = z.im;
            h[(i + n) * m + j + n] = -z.re;
        }
    }
    let (vals, vecs) = symmetric_eigen(h, m);
    let scale = vals.first().copied().unwrap_or(0.0).abs();
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let column = |k: usize| -> Vec<C64> { (0..n).map(|i| C64::new(vecs[i * m + k], vecs[(i + n) * m + k])).collect() };

    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut k = 0;
    while k < m && cols.len() < n && vals[k] > tol {
        cols.push(column(k));
        values.push(vals[k]);
        k += 1;
    }

    // null space: candidates are all eigenvectors with |value| <= tol
    let mut pool: Vec<Vec<C64>> = (k..m).filter(|&j| vals[j].abs() <= tol).map(column).collect();
    while cols.len() < n {
        let mut best: Option<(usize, f64, Vec<C64>)> = None;
        for (idx, cand) in pool.iter().enumerate() {
            let r = orthogonalize(cand, &cols);
            let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|b| norm > b.1) {
                best = Some((idx, norm, r));
            }
        }
        match best {
            Some((idx, norm, r)) if norm > 1e-6 => {
                pool.swap_remove(idx);
                cols.push(r.into_iter().map(|z| z / norm).collect());
                values.push(0.0);
            }
            _ => {
                return Err(Error::Unphysical(
                    "takagi: could not complete the null-space basis".into(),
                ))
            }
        }
    }

    let unitary = ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
    Ok(TakagiFactorization { unitary, values })
}

// Two passes of classical Gram-Schmidt against the accepted columns.
fn orthogonalize(v: &[C64], basis: &[Vec<C64>]) -> Vec<C64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let proj: C64 = b.iter().zip(&r).map(|(x, y)| x.conj() * y).sum();
            if proj == ZERO {
                continue;
            }
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= proj * bi;
            }
        }
    }
    r
}
