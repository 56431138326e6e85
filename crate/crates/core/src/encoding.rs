//! Graph ↔ device mapping: the adjacency matrix, rescaled by `c`, becomes the
//! `A` block of a pure-state sampling matrix, realised through a Takagi
//! factorization (squeezers `atanh(c λ_i)` and interferometer `U`).

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, NoiseConfig};
use crate::numerics::{inverse, takagi, ComplexMatrix, ONE};
use crate::pattern::ClickPattern;

pub use crate::graph::Graph;

/// Graphs above this size are refused.
pub const MAX_ENCODE_VERTICES: usize = 64;
/// Tolerance on the mean-click target reached by [`choose_scale`].
pub const SCALE_TARGET_TOL: f64 = 1e-9;

/// Squeezers, interferometer and scale for a lossless device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    pub squeezing: Vec<f64>,
    pub interferometer: ComplexMatrix,
    pub scale: f64,
}

impl DeviceParams {
    pub fn modes(&self) -> usize {
        self.squeezing.len()
    }

    pub fn state(&self) -> Result<GaussianState> {
        GaussianState::from_device(&self.squeezing, &self.interferometer)
    }
}

fn check_size(g: &Graph) -> Result<()> {
    if g.n() > MAX_ENCODE_VERTICES {
        return Err(Error::CostGuard(format!(
            "graph has {} vertices; the encoder handles at most {MAX_ENCODE_VERTICES}",
            g.n()
        )));
    }
    Ok(())
}

/// Largest Takagi value (spectral norm) of the adjacency matrix.
pub fn spectral_radius(g: &Graph) -> Result<f64> {
    Ok(takagi(g.adjacency())?.max_value())
}

/// Device realising sampling matrix `A = cΔ`.
pub fn encode_graph(g: &Graph, c: f64) -> Result<DeviceParams> {
    check_size(g)?;
    let f = takagi(g.adjacency())?;
    let lmax = f.max_value();
    if !(c > 0.0 && c.is_finite() && c * lmax < 1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "scale c = {c} must satisfy 0 < c < 1/λ_max = {}",
            1.0 / lmax
        )));
    }
    let squeezing = f.values.iter().map(|&l| (c * l).atanh()).collect();
    Ok(DeviceParams { squeezing, interferometer: f.unitary, scale: c })
}

/// Expected click count of the lossless device with `A = cΔ`, from the exact
/// single-mode marginals.
pub fn expected_clicks_at_scale(g: &Graph, c: f64) -> Result<f64> {
    expected_clicks_with_noise(g, c, NoiseConfig::default())
}

/// Expected click count of the device with `A = cΔ` after `noise`.
pub fn expected_clicks_with_noise(g: &Graph, c: f64, noise: NoiseConfig) -> Result<f64> {
    let n = g.n();
    let a = g.adjacency().scale(ONE * c);
    let neg = a.scale(-ONE);
    let id = ComplexMatrix::identity(n);
    let husimi = inverse(&ComplexMatrix::from_blocks(&id, &neg.conj(), &neg, &id)?)?;
    let state = GaussianState::from_husimi_unchecked(husimi);
    if noise == NoiseConfig::default() {
        return Ok(state.expected_clicks());
    }
    Ok(noise.apply(&state)?.expected_clicks())
}

/// Scale `c` whose encoded lossless device clicks `target_mean_clicks` times
/// on average. Bisection on `(0, 1/λ_max)`.
pub fn choose_scale(g: &Graph, target_mean_clicks: f64) -> Result<f64> {
    choose_scale_with_noise(g, target_mean_clicks, NoiseConfig::default())
}

/// As [`choose_scale`], with the click count taken after `noise`.
pub fn choose_scale_with_noise(g: &Graph, target_mean_clicks: f64, noise: NoiseConfig) -> Result<f64> {
    check_size(g)?;
    let n = g.n() as f64;
    if !(target_mean_clicks > 0.0 && target_mean_clicks < n) {
        return Err(Error::InvalidArgument(format!(
            "target mean clicks {target_mean_clicks} must lie in (0, {n})"
        )));
    }
    let lmax = spectral_radius(g)?;
    if lmax == 0.0 {
        return Err(Error::Unreachable { target: target_mean_clicks, supremum: 0.0 });
    }
    let mut hi = (1.0 - 1e-9) / lmax;
    let sup = expected_clicks_with_noise(g, hi, noise)?;
    if sup < target_mean_clicks {
        return Err(Error::Unreachable { target: target_mean_clicks, supremum: sup });
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = expected_clicks_with_noise(g, mid, noise)?;
        if (f - target_mean_clicks).abs() < SCALE_TARGET_TOL {
            return Ok(mid);
        }
        if f < target_mean_clicks {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Induced subgraph on the clicked vertices.
pub fn subgraph(g: &Graph, pattern: &ClickPattern) -> Result<Graph> {
    if pattern.len() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "pattern of length {} for a graph with {} vertices",
            pattern.len(),
            g.n()
        )));
    }
    Ok(g.induced(&pattern.clicked()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, rng: &mut impl Rng) -> Graph {
        let b = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        Graph::new(b.symmetrized()).unwrap()
    }

    fn pair() -> Graph {
        Graph::from_edges(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn zero_graph_is_vacuum() {
        let g = Graph::new(ComplexMatrix::zeros(3, 3)).unwrap();
        let d = encode_graph(&g, 0.5).unwrap();
        assert_eq!(d.squeezing, vec![0.0; 3]);
        assert!(d.state().unwrap().husimi().relative_distance(&ComplexMatrix::identity(6)) < 1e-15);
    }

    #[test]
    fn single_pair_squeezing() {
        let d = encode_graph(&pair(), 0.5).unwrap();
        for r in &d.squeezing {
            assert!((r - 0.5f64.atanh()).abs() < 1e-12);
        }
        assert!((0.5f64.atanh() - 0.5493).abs() < 1e-4);
    }

    #[test]
    fn scale_out_of_range() {
        assert!(encode_graph(&pair(), 1.0).is_err());
        assert!(encode_graph(&pair(), 0.0).is_err());
        assert!(encode_graph(&pair(), -0.1).is_err());
    }

    #[test]
    fn roundtrip_random_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = random_graph(8, &mut rng);
        let c = 0.9 / spectral_radius(&g).unwrap();
        let state = encode_graph(&g, c).unwrap().state().unwrap();
        let target = g.adjacency().scale(ONE * c);
        let a = state.sampling_matrix().unwrap().a;
        assert!(a.relative_distance(&target) < 1e-8);
    }

    #[test]
    fn choose_scale_single_pair_closed_form() {
        // each mode of the pair is thermal with n̄ = sinh²(atanh c): clicks = 2c²
        for target in [0.1, 0.5, 1.0, 1.5, 1.9] {
            let c = choose_scale(&pair(), target).unwrap();
            let exact = (target / 2.0f64).sqrt();
            assert!((c - exact).abs() < 1e-6, "target {target}: {c} vs {exact}");
            let state = encode_graph(&pair(), c).unwrap().state().unwrap();
            let photons = 2.0 * c.atanh().sinh().powi(2);
            assert!((state.mean_photon_number() - photons).abs() < 1e-8);
        }
    }

    #[test]
    fn choose_scale_limits_and_errors() {
        let g = pair();
        assert!(choose_scale(&g, 1e-8).unwrap() < 1e-3);
        assert!(choose_scale(&g, 0.0).is_err());
        assert!(choose_scale(&g, 2.0).is_err());
        let zero = Graph::new(ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(matches!(choose_scale(&zero, 1.0), Err(Error::Unreachable { .. })));
        // a single edge in a 4-vertex graph cannot make 3 clicks on average
        let sparse = Graph::from_edges(4, &[(0, 1)]).unwrap();
        match choose_scale(&sparse, 3.0) {
            Err(Error::Unreachable { supremum, .. }) => assert!(supremum <= 2.0 + 1e-9),
            other => panic!("expected unreachable, got {other:?}"),
        }
    }

    #[test]
    fn choose_scale_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let g = random_graph(6, &mut rng);
        let mut last = 0.0;
        for step in 1..10 {
            let c = choose_scale(&g, step as f64 * 0.5).unwrap();
            assert!(c > last);
            let hit = expected_clicks_at_scale(&g, c).unwrap();
            assert!((hit - step as f64 * 0.5).abs() < 1e-4);
            last = c;
        }
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = random_graph(5, &mut rng);
        let perm = [3, 0, 4, 1, 2];
        let pg = g.induced(&perm);
        let c = 0.5 / spectral_radius(&g).unwrap();
        let a = encode_graph(&g, c).unwrap().state().unwrap().sampling_matrix().unwrap().a;
        let pa = encode_graph(&pg, c).unwrap().state().unwrap().sampling_matrix().unwrap().a;
        assert!(pa.relative_distance(&a.principal(&perm)) < 1e-9);
    }

    #[test]
    fn subgraph_cases() {
        let k4: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        let mut edges = k4.clone();
        edges.extend([(4, 5), (0, 5)]);
        let g = Graph::from_edges(6, &edges).unwrap();
        assert_eq!(subgraph(&g, &ClickPattern::new(vec![true; 6])).unwrap(), g);
        assert_eq!(subgraph(&g, &ClickPattern::zeros(6)).unwrap().n(), 0);
        let s = subgraph(&g, &ClickPattern::from_clicked(6, &[0, 1, 2, 3]).unwrap()).unwrap();
        let jm = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { C64::new(0.0, 0.0) } else { ONE });
        assert_eq!(s.adjacency(), &jm);
        assert!(subgraph(&g, &ClickPattern::zeros(5)).is_err());
    }
}
