//! Exact hafnian and torontonian.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{det_in_place, ComplexMatrix, C64, ONE, SYMMETRY_TOL, ZERO};

/// Largest matrix dimension accepted by [`hafnian`].
pub const MAX_HAFNIAN_DIM: usize = 24;
/// Largest mode count accepted by [`torontonian`].
pub const MAX_TORONTONIAN_MODES: usize = 16;
/// Relative imaginary part tolerated in torontonian subset determinants.
pub const DET_IMAG_TOL: f64 = 1e-8;

// Up to this size the pairing recursion is used; it is exact on integer
// matrices. Larger sizes go through the power-trace formula.
const PAIRING_MAX_DIM: usize = 14;
// Subset sums with at least this many modes are split across rayon workers.
const PARALLEL_MODES: usize = 12;

/// Hafnian of a symmetric matrix of even dimension (diagonal ignored).
pub fn hafnian(m: &ComplexMatrix) -> Result<C64> {
    let n = m.require_square()?;
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n > MAX_HAFNIAN_DIM {
        return Err(Error::CostGuard(format!(
            "hafnian of dimension {n} exceeds the limit of {MAX_HAFNIAN_DIM}"
        )));
    }
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(if n <= PAIRING_MAX_DIM { hafnian_pairing(m) } else { hafnian_power_trace(m) })
}

/// Recursive pairing contraction: match the lowest free vertex with every
/// remaining partner. Zero entries prune whole branches.
pub fn hafnian_pairing(m: &ComplexMatrix) -> C64 {
    let n = m.rows();
    if n == 0 {
        return ONE;
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    pairing_rec(m, full)
}

fn pairing_rec(m: &ComplexMatrix, free: u32) -> C64 {
    if free == 0 {
        return ONE;
    }
    let i = free.trailing_zeros() as usize;
    let rest = free & !(1 << i);
    let mut total = ZERO;
    let mut partners = rest;
    while partners != 0 {
        let j = partners.trailing_zeros() as usize;
        partners &= partners - 1;
        let w = m[(i, j)];
        if w != ZERO {
            total += w * pairing_rec(m, rest & !(1 << j));
        }
    }
    total
}

/// Power-trace formula: with `X` swapping each vertex pair `(2i, 2i+1)`,
/// `haf(B) = Σ_Z (-1)^{m-|Z|} f((BX)_Z)` where `f(C)` is the `λ^m`
/// coefficient of `exp(Σ_j tr(C^j) λ^j / 2j)`. Cost `O(m n³ 2^m)`.
pub fn hafnian_power_trace(m: &ComplexMatrix) -> C64 {
    let n = m.rows();
    if n == 0 {
        return ONE;
    }
    let half = n / 2;
    // BX with a zeroed diagonal
    let bx = ComplexMatrix::from_fn(n, n, |i, j| {
        let partner = j ^ 1;
        if i == partner {
            ZERO
        } else {
            m[(i, partner)]
        }
    });
    let term = |mask: u32| -> C64 {
        let idx: Vec<usize> = (0..half).filter(|p| mask >> p & 1 == 1).flat_map(|p| [2 * p, 2 * p + 1]).collect();
        let c = bx.principal(&idx);
        let coeff = exp_series_coefficient(&power_traces(&c, half), half);
        if (half - mask.count_ones() as usize).is_multiple_of(2) {
            coeff
        } else {
            -coeff
        }
    };
    ordered_sum(half, term)
}

// tr(C^j) for j = 1..=k.
fn power_traces(c: &ComplexMatrix, k: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(k);
    if c.rows() == 0 {
        out.resize(k, ZERO);
        return out;
    }
    let mut p = c.clone();
    for j in 1..=k {
        out.push(p.trace());
        if j < k {
            p = p.matmul(c).expect("square");
        }
    }
    out
}

// Coefficient of λ^k in exp(Σ_j traces[j-1] λ^j / 2j).
fn exp_series_coefficient(traces: &[C64], k: usize) -> C64 {
    let q: Vec<C64> = traces.iter().enumerate().map(|(j, &t)| t / (2.0 * (j + 1) as f64)).collect();
    let mut p = vec![ZERO; k + 1];
    p[0] = ONE;
    for deg in 1..=k {
        let mut acc = ZERO;
        for j in 1..=deg {
            acc += q[j - 1] * (j as f64) * p[deg - j];
        }
        p[deg] = acc / deg as f64;
    }
    p[k]
}

// Sums term(mask) over all 2^bits masks in mask order, independent of the
// number of workers.
fn ordered_sum<T, F>(bits: usize, term: F) -> T
where
    T: Send + Copy + std::iter::Sum<T>,
    F: Fn(u32) -> T + Sync,
{
    let count = 1u32 << bits;
    if bits >= PARALLEL_MODES {
        let terms: Vec<T> = (0..count).into_par_iter().map(&term).collect();
        terms.into_iter().sum()
    } else {
        (0..count).map(term).sum()
    }
}

/// `|Haf(Δ_S)|²` for the induced submatrix on `subset`.
pub fn hafnian_sq_mod(graph: &Graph, subset: &[usize]) -> Result<f64> {
    if subset.len() % 2 == 1 {
        return Err(Error::OddDimension(subset.len()));
    }
    graph.check_subset(subset)?;
    let sub = graph.adjacency().principal(subset);
    Ok(hafnian(&sub)?.norm_sqr())
}

/// Torontonian of a `2m x 2m` matrix in (first block, second block) ordering:
/// `Σ_Z (-1)^{m-|Z|} / sqrt(det(I - o_Z))`.
pub fn torontonian(o: &ComplexMatrix) -> Result<f64> {
    torontonian_bounded(o, MAX_TORONTONIAN_MODES)
}

pub(crate) fn torontonian_bounded(o: &ComplexMatrix, max_modes: usize) -> Result<f64> {
    let dim = o.require_square()?;
    if dim % 2 == 1 {
        return Err(Error::OddDimension(dim));
    }
    let m = dim / 2;
    if m > max_modes {
        return Err(Error::CostGuard(format!(
            "torontonian over {m} modes exceeds the limit of {max_modes}"
        )));
    }
    let data = o.as_slice();
    let term = |mask: u32| -> Result<f64> {
        let mut idx = Vec::with_capacity(2 * m);
        for i in 0..m {
            if mask >> i & 1 == 1 {
                idx.push(i);
            }
        }
        let k = idx.len();
        for i in 0..k {
            idx.push(idx[i] + m);
        }
        let d = idx.len();
        let mut buf = Vec::with_capacity(d * d);
        for (a, &r) in idx.iter().enumerate() {
            for (b, &c) in idx.iter().enumerate() {
                let delta = if a == b { ONE } else { ZERO };
                buf.push(delta - data[r * dim + c]);
            }
        }
        let det = det_in_place(&mut buf, d);
        if det.re <= 0.0 || det.im.abs() > DET_IMAG_TOL * det.norm() {
            return Err(Error::Unphysical(format!(
                "det(I - o_Z) = {det} is not positive real for subset mask {mask:#b}"
            )));
        }
        let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign / det.re.sqrt())
    };
    let count = 1u32 << m;
    let terms: Vec<Result<f64>> = if m >= PARALLEL_MODES {
        (0..count).into_par_iter().map(term).collect()
    } else {
        (0..count).map(term).collect()
    };
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

/// Torontonian from a real quadrature form.
///
/// `r` is a row-major `2n × 2n` real symmetric positive-definite matrix with
/// mode `i` at rows `i` and `i + n`. Returns
/// `Σ_{Z ⊆ subset} (-1)^{|subset| - |Z|} / sqrt(det r_Z)`, which equals the
/// torontonian of `O` whenever `r` is `I - O` rotated into quadratures.
/// Subsets are walked depth-first, each child extending its parent's
/// Cholesky factor by two rows.
pub(crate) fn torontonian_quadrature(r: &[f64], n: usize, subset: &[usize]) -> Result<f64> {
    let c = subset.len();
    if c > MAX_HAFNIAN_DIM {
        return Err(Error::CostGuard(format!("torontonian over {c} modes exceeds the limit of {MAX_HAFNIAN_DIM}")));
    }
    let dim = 2 * c;
    let mut walk = CholeskyWalk {
        r,
        stride: 2 * n,
        n,
        subset,
        l: vec![0.0; dim * dim],
        rows: vec![0; dim],
        dim,
        total: 0.0,
    };
    let sign = if c.is_multiple_of(2) { 1.0 } else { -1.0 };
    walk.total = sign;
    walk.descend(0, 0, 1.0, sign)?;
    Ok(walk.total)
}

struct CholeskyWalk<'a> {
    r: &'a [f64],
    stride: usize,
    n: usize,
    subset: &'a [usize],
    /// Lower factor of the current path, row-major `dim × dim`.
    l: Vec<f64>,
    /// Row of `r` behind each factor row.
    rows: Vec<usize>,
    dim: usize,
    total: f64,
}

impl CholeskyWalk<'_> {
    /// Extends a path holding `d` factor rows with every later subset mode.
    fn descend(&mut self, start: usize, d: usize, diag_prod: f64, sign: f64) -> Result<()> {
        for pos in start..self.subset.len() {
            let mode = self.subset[pos];
            let mut prod = diag_prod;
            for (off, row) in [mode, mode + self.n].into_iter().enumerate() {
                let i = d + off;
                self.rows[i] = row;
                let base = row * self.stride;
                for t in 0..i {
                    let mut v = self.r[base + self.rows[t]];
                    for s in 0..t {
                        v -= self.l[i * self.dim + s] * self.l[t * self.dim + s];
                    }
                    self.l[i * self.dim + t] = v / self.l[t * self.dim + t];
                }
                let mut v = self.r[base + row];
                for s in 0..i {
                    v -= self.l[i * self.dim + s] * self.l[i * self.dim + s];
                }
                if v.is_nan() || v <= 0.0 {
                    return Err(Error::Unphysical(format!("quadrature form is not positive definite (pivot {v:.3e})")));
                }
                let piv = v.sqrt();
                self.l[i * self.dim + i] = piv;
                prod *= piv;
            }
            let child = -sign;
            self.total += child / prod;
            self.descend(pos + 1, d + 2, prod, child)?;
        }
        Ok(())
    }
}
