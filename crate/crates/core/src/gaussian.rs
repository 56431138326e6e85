//! Zero-mean Gaussian states of `M` optical modes and their threshold-detection
//! statistics.
//!
//! States are held as the Husimi covariance `σ_Q = σ + I/2` in the complex
//! `(a_1..a_M, a†_1..a†_M)` ordering, so the vacuum is the identity. The
//! sampling matrix is `𝒜 = X (I - σ_Q⁻¹)` with `X = [[0, I], [I, 0]]`.

use crate::error::{Error, Result};
use crate::matfn::torontonian_bounded;
use crate::numerics::{self, hermitian_eigenvalues, inverse, ComplexMatrix, ONE};
use crate::pattern::ClickPattern;

/// Hermiticity tolerance for a Husimi matrix (relative Frobenius).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Slack on the `λ_min(σ_Q) ≥ 1/2` physicality floor.
pub const PHYSICAL_TOL: f64 = 1e-8;
/// Tolerated asymmetry of the extracted `A` block.
pub const SAMPLING_SYMMETRY_TOL: f64 = 1e-9;
/// Unitarity tolerance for interferometers.
pub const UNITARY_TOL: f64 = 1e-9;

/// Covariance description of a (possibly mixed) zero-mean Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    husimi: ComplexMatrix,
}

/// `𝒜 = [[A, L], [L†, A*]]`.
#[derive(Debug, Clone)]
pub struct SamplingMatrix {
    pub a: ComplexMatrix,
    pub l: ComplexMatrix,
    pub full: ComplexMatrix,
}

/// Uniform noise applied to a simulated device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Transmission, 1 = lossless.
    pub eta: f64,
    /// Thermal admixture, 0 = pure squeezing.
    pub epsilon: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { eta: 1.0, epsilon: 0.0 }
    }
}

impl NoiseConfig {
    pub fn new(eta: f64, epsilon: f64) -> Result<Self> {
        check_unit("eta", eta)?;
        check_unit("epsilon", epsilon)?;
        Ok(Self { eta, epsilon })
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        let lossy = state.apply_loss(&vec![self.eta; state.modes()])?;
        lossy.apply_thermal(self.epsilon)
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {x} is outside [0, 1]")))
    }
}

impl GaussianState {
    /// Validates Hermiticity and the uncertainty floor on the spectrum.
    pub fn new(husimi: ComplexMatrix) -> Result<Self> {
        let dim = husimi.require_square()?;
        if dim % 2 == 1 {
            return Err(Error::OddDimension(dim));
        }
        let nh = husimi.non_hermiticity();
        if nh > HERMITIAN_TOL {
            return Err(Error::Unphysical(format!("covariance is not Hermitian ({nh:.3e})")));
        }
        let min_eig = hermitian_eigenvalues(&husimi).last().copied().unwrap_or(1.0);
        if min_eig < 0.5 - PHYSICAL_TOL {
            return Err(Error::Unphysical(format!(
                "covariance eigenvalue {min_eig:.6e} violates the 1/2 floor"
            )));
        }
        Ok(Self::from_husimi_unchecked(husimi))
    }

    pub(crate) fn from_husimi_unchecked(husimi: ComplexMatrix) -> Self {
        Self { modes: husimi.rows() / 2, husimi }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::from_husimi_unchecked(ComplexMatrix::identity(2 * modes))
    }

    /// Squeezed vacua with parameters `squeezing` sent through `interferometer`.
    ///
    /// Builds `A = U diag(tanh r) Uᵀ` and `σ_Q = (I - X diag(A, A*))⁻¹`.
    pub fn from_device(squeezing: &[f64], interferometer: &ComplexMatrix) -> Result<Self> {
        let m = interferometer.require_square()?;
        if squeezing.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{} squeezers for a {m}-mode interferometer",
                squeezing.len()
            )));
        }
        if let Some(r) = squeezing.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::InvalidArgument(format!("squeezing parameter {r} must be finite and >= 0")));
        }
        if !interferometer.is_unitary(UNITARY_TOL) {
            return Err(Error::InvalidArgument("interferometer is not unitary".into()));
        }
        let u = interferometer;
        let t: Vec<f64> = squeezing.iter().map(|r| r.tanh()).collect();
        let a = ComplexMatrix::from_fn(m, m, |i, j| (0..m).map(|k| u[(i, k)] * u[(j, k)] * t[k]).sum());
        Self::from_pure_sampling(&a)
    }

    /// Pure state whose sampling matrix is `diag(A, A*)`.
    pub fn from_pure_sampling(a: &ComplexMatrix) -> Result<Self> {
        a.require_square()?;
        let asym = a.asymmetry();
        if asym > SAMPLING_SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let m = a.rows();
        let neg_a = a.scale(-ONE);
        let id = ComplexMatrix::identity(m);
        let q_inv = ComplexMatrix::from_blocks(&id, &neg_a.conj(), &neg_a, &id)?;
        let mut husimi = inverse(&q_inv)?;
        // restore exact Hermiticity lost to rounding
        husimi = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| (husimi[(i, j)] + husimi[(j, i)].conj()) * 0.5);
        Self::new(husimi)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn husimi(&self) -> &ComplexMatrix {
        &self.husimi
    }

    /// `𝒜 = X(I - σ_Q⁻¹)` split into its blocks.
    pub fn sampling_matrix(&self) -> Result<SamplingMatrix> {
        let m = self.modes;
        let o = self.o_matrix()?;
        let full = ComplexMatrix::block_swap(m).matmul(&o)?;
        let a = full.block(0, 0, m, m);
        let asym = a.sub(&a.transpose())?.frobenius_norm() / full.frobenius_norm().max(1.0);
        if asym > SAMPLING_SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let a = a.symmetrized();
        let l = full.block(0, m, m, m);
        Ok(SamplingMatrix { a, l, full })
    }

    /// `O = I - σ_Q⁻¹`.
    pub fn o_matrix(&self) -> Result<ComplexMatrix> {
        let inv = inverse(&self.husimi)?;
        ComplexMatrix::identity(2 * self.modes).sub(&inv)
    }

    /// Per-mode loss: `σ_Q → D σ_Q D + I - D²`, `D = diag(√η, √η)`.
    pub fn apply_loss(&self, eta: &[f64]) -> Result<Self> {
        let m = self.modes;
        if eta.len() != m {
            return Err(Error::DimensionMismatch(format!("{} transmissions for {m} modes", eta.len())));
        }
        for &e in eta {
            check_unit("eta", e)?;
        }
        let d: Vec<f64> = (0..2 * m).map(|i| eta[i % m].sqrt()).collect();
        let husimi = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let base = self.husimi[(i, j)] * (d[i] * d[j]);
            if i == j {
                base + (1.0 - d[i] * d[i])
            } else {
                base
            }
        });
        Ok(Self::from_husimi_unchecked(husimi))
    }

    /// Thermal admixture `ε`: every input squeezer is replaced by the mixture
    /// `(1-ε) squeezed + ε thermal` of equal mean photon number.
    ///
    /// For a state produced by squeezers, a passive interferometer and loss,
    /// this keeps the normally ordered blocks of `σ_Q` and scales the
    /// anomalous (off-diagonal) blocks by `1 - ε`; that is how it is applied.
    pub fn apply_thermal(&self, epsilon: f64) -> Result<Self> {
        check_unit("epsilon", epsilon)?;
        let m = self.modes;
        let keep = 1.0 - epsilon;
        let husimi = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
            let z = self.husimi[(i, j)];
            if (i < m) == (j < m) {
                z
            } else {
                z * keep
            }
        });
        Ok(Self::from_husimi_unchecked(husimi))
    }

    /// Restriction to `keep` (rows/columns `i` and `i + M`).
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("cannot reduce to an empty mode set".into()));
        }
        let m = self.modes;
        if let Some(&bad) = keep.iter().find(|&&i| i >= m) {
            return Err(Error::InvalidArgument(format!("mode {bad} out of range for {m} modes")));
        }
        let idx: Vec<usize> = keep.iter().copied().chain(keep.iter().map(|&i| i + m)).collect();
        Ok(Self::from_husimi_unchecked(self.husimi.principal(&idx)))
    }

    /// `det σ_Q`, real and ≥ 1 for physical states.
    pub fn husimi_det(&self) -> Result<f64> {
        let d = numerics::det(&self.husimi)?;
        if d.re <= 0.0 || d.im.abs() > 1e-8 * d.norm() {
            return Err(Error::Unphysical(format!("det σ_Q = {d} is not positive real")));
        }
        Ok(d.re)
    }

    /// Exact probability of a threshold-detection pattern:
    /// `Tor(O_S) / sqrt(det σ_Q)`.
    pub fn pattern_probability(&self, pattern: &ClickPattern) -> Result<f64> {
        let m = self.modes;
        if pattern.len() != m {
            return Err(Error::DimensionMismatch(format!("pattern of length {} for {m} modes", pattern.len())));
        }
        let clicked = pattern.clicked();
        if clicked.len() > crate::matfn::MAX_TORONTONIAN_MODES {
            return Err(Error::CostGuard(format!(
                "pattern has {} clicks; the limit is {}",
                clicked.len(),
                crate::matfn::MAX_TORONTONIAN_MODES
            )));
        }
        let o = self.o_matrix()?;
        let idx: Vec<usize> = clicked.iter().copied().chain(clicked.iter().map(|&i| i + m)).collect();
        let tor = torontonian_bounded(&o.principal(&idx), crate::matfn::MAX_TORONTONIAN_MODES)?;
        check_probability(tor / self.husimi_det()?.sqrt())
    }

    /// Per-mode click probabilities `1 - 1/sqrt(det σ_Q^(i))`.
    pub fn click_marginals(&self) -> Vec<f64> {
        let m = self.modes;
        (0..m)
            .map(|i| {
                let a = self.husimi[(i, i)];
                let b = self.husimi[(i, i + m)];
                let c = self.husimi[(i + m, i)];
                let d = self.husimi[(i + m, i + m)];
                let det = (a * d - b * c).re;
                (1.0 - 1.0 / det.sqrt()).clamp(0.0, 1.0)
            })
            .collect()
    }

    pub fn expected_clicks(&self) -> f64 {
        self.click_marginals().iter().sum()
    }

    /// `Σ_i ⟨a†_i a_i⟩ = Σ_i (σ_Q)_ii - M` over the first block.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.modes).map(|i| self.husimi[(i, i)].re - 1.0).sum()
    }
}

pub(crate) fn check_probability(p: f64) -> Result<f64> {
    if !(-PHYSICAL_TOL..=1.0 + PHYSICAL_TOL).contains(&p) {
        return Err(Error::Unphysical(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

impl SamplingMatrix {
    /// Rebuild the block form `[[A, L], [L†, A*]]`.
    pub fn assemble(a: &ComplexMatrix, l: &ComplexMatrix) -> Result<ComplexMatrix> {
        ComplexMatrix::from_blocks(a, l, &l.adjoint(), &a.conj())
    }
}
