//! LU factorization with partial pivoting: determinants and inverses.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative pivot floor below which a matrix is treated as singular.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// Determinant of the row-major `n x n` buffer, destroying it.
///
/// Hot path for subset determinants; no allocation and no singularity error
/// (an exactly zero pivot returns zero).
pub(crate) fn det_in_place(a: &mut [C64], n: usize) -> C64 {
    let mut det = ONE;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if p != k {
            for j in k..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        let inv = pivot.inv();
        for i in (k + 1)..n {
            let f = a[i * n + k] * inv;
            if f == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
            }
        }
    }
    det
}

/// Determinant via pivoted LU.
pub fn det(m: &ComplexMatrix) -> Result<C64> {
    let n = m.require_square()?;
    let mut buf = m.as_slice().to_vec();
    Ok(det_in_place(&mut buf, n))
}

/// Inverse via Gauss-Jordan elimination with partial pivoting.
///
/// Fails when a pivot falls below `SINGULAR_PIVOT` times the largest entry.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    let scale = m.max_abs();
    let threshold = SINGULAR_PIVOT * scale.max(f64::MIN_POSITIVE);
    let mut a = m.as_slice().to_vec();
    let mut inv = ComplexMatrix::identity(n).into_vec();
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].norm();
        for i in (k + 1)..n {
            let v = a[i * n + k].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            return Err(Error::Singular { pivot: best, threshold });
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
                inv.swap(k * n + j, p * n + j);
            }
        }
        let pinv = a[k * n + k].inv();
        for j in 0..n {
            a[k * n + j] *= pinv;
            inv[k * n + j] *= pinv;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i * n + k];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let (ak, ik) = (a[k * n + j], inv[k * n + j]);
                a[i * n + j] -= f * ak;
                inv[i * n + j] -= f * ik;
            }
        }
    }
    Ok(ComplexMatrix::from_vec_unchecked(n, n, inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    // Laplace expansion along the first row; independent of the LU path.
    fn cofactor_det(m: &ComplexMatrix) -> C64 {
        let n = m.rows();
        if n == 0 {
            return ONE;
        }
        if n == 1 {
            return m[(0, 0)];
        }
        let mut total = ZERO;
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = m.select(&rows, &cols);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += m[(0, j)] * cofactor_det(&minor) * sign;
        }
        total
    }

    #[test]
    fn det_identity_and_swap() {
        assert_eq!(det(&ComplexMatrix::identity(3)).unwrap(), ONE);
        let swap = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(det(&swap).unwrap(), -ONE);
    }

    #[test]
    fn det_rejects_non_square() {
        assert!(matches!(det(&ComplexMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn det_matches_cofactor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = random_matrix(6, &mut rng);
            let lu = det(&m).unwrap();
            let oracle = cofactor_det(&m);
            assert!((lu - oracle).norm() / oracle.norm() < 1e-10, "{lu} vs {oracle}");
        }
    }

    #[test]
    fn det_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = random_matrix(5, &mut rng);
            let b = random_matrix(5, &mut rng);
            let lhs = det(&a.matmul(&b).unwrap()).unwrap();
            let rhs = det(&a).unwrap() * det(&b).unwrap();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-8);
        }
    }

    #[test]
    fn inverse_cases() {
        let id = ComplexMatrix::identity(4);
        assert_eq!(inverse(&id).unwrap(), id);

        let d = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 4.0]).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.25]).unwrap();
        assert!(inverse(&d).unwrap().relative_distance(&expected) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_matrix(8, &mut rng).add(&ComplexMatrix::identity(8).scale(C64::new(3.0, 0.0))).unwrap();
        let residual = m.matmul(&inverse(&m).unwrap()).unwrap();
        assert!(residual.relative_distance(&ComplexMatrix::identity(8)) < 1e-9);
    }

    #[test]
    fn inverse_detects_singular() {
        let s = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(inverse(&s), Err(Error::Singular { .. })));
    }
}
