//! Benchmark studies: Torontonian/Hafnian/density correlation, score and
//! speed advantage of pool-fed search, geometric step-count fits and noise
//! sweeps. Every study is a pure function of its inputs and master seed.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{choose_scale, choose_scale_with_noise, encode_graph};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, NoiseConfig};
use crate::graph::Graph;
use crate::matfn::{hafnian, torontonian};
use crate::numerics::{takagi, ComplexMatrix, C64};
use crate::sampler::{sample_postselected, PostselectedStream, SamplePool};
use crate::solvers::{random_search, Objective, ObjectiveKind, ProposalSource, RunTrace};
use crate::stats::{self, Z_95_TWO_SIDED};

/// Mode count of the correlation ensemble.
pub const CORRELATION_MODES: usize = 4;
/// Spectral norm the correlation ensemble is rescaled to.
pub const CORRELATION_NORM: f64 = 0.9;

/// Pure function from a master seed and labels to a child seed (SplitMix64
/// finalizer over the folded inputs).
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    let mut x = master;
    for &l in labels {
        x = mix64(x ^ mix64(l.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    mix64(x)
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
// correlation

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    /// Torontonian of the full-click pattern.
    pub tor: f64,
    pub haf_sq: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub seed: u64,
    pub n_matrices: usize,
    pub spearman_tor_haf: f64,
    pub spearman_tor_density: f64,
    /// Large-sample z statistics of the two rank correlations.
    pub z_tor_haf: f64,
    pub z_tor_density: f64,
    pub rows: Vec<CorrelationRow>,
}

/// Complex symmetric `n × n` matrix with real and imaginary parts uniform on
/// `[-1, 1]`, symmetrized, then rescaled to spectral norm `norm`.
pub fn random_sampling_block(n: usize, norm: f64, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    let raw = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)));
    let sym = raw.symmetrized();
    let top = takagi(&sym)?.max_value();
    if top == 0.0 {
        return Ok(sym);
    }
    Ok(sym.scale(C64::new(norm / top, 0.0)))
}

/// Torontonian, `|Haf|²` and density of the pure state whose sampling
/// matrix has top-left block `a` (spectral norm below 1).
pub fn correlation_row(a: &ComplexMatrix) -> Result<CorrelationRow> {
    let state = GaussianState::from_pure_sampling(a)?;
    let tor = torontonian(&state.o_matrix()?)?;
    let haf_sq = hafnian(a)?.norm_sqr();
    let density = a.as_slice().iter().sum::<C64>().norm();
    Ok(CorrelationRow { tor, haf_sq, density })
}

pub fn correlation_study(n_matrices: usize, seed: u64) -> Result<CorrelationReport> {
    if n_matrices < 2 {
        return Err(Error::InvalidArgument(format!("correlation study needs at least 2 matrices, got {n_matrices}")));
    }
    let rows = (0..n_matrices)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64]));
            correlation_row(&random_sampling_block(CORRELATION_MODES, CORRELATION_NORM, &mut rng)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let tor: Vec<f64> = rows.iter().map(|r| r.tor).collect();
    let haf: Vec<f64> = rows.iter().map(|r| r.haf_sq).collect();
    let den: Vec<f64> = rows.iter().map(|r| r.density).collect();
    let rho_h = stats::spearman(&tor, &haf);
    let rho_d = stats::spearman(&tor, &den);
    Ok(CorrelationReport {
        seed,
        n_matrices,
        spearman_tor_haf: rho_h,
        spearman_tor_density: rho_d,
        z_tor_haf: stats::correlation_z(rho_h, n_matrices),
        z_tor_density: stats::correlation_z(rho_d, n_matrices),
        rows,
    })
}

pub fn correlation_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from("tor,haf_sq,density\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.tor, r.haf_sq, r.density);
    }
    out
}

// ---------------------------------------------------------------------------
// advantage ratios

/// A ratio of means with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub standard_error: f64,
}

fn ratio_of_means(num: &[f64], den: &[f64]) -> Result<RatioEstimate> {
    let (mn, md) = (stats::mean(num), stats::mean(den));
    if md == 0.0 {
        return Err(Error::InvalidArgument("ratio undefined: classical mean is zero".into()));
    }
    let ratio = mn / md;
    let (sn, sd) = (stats::std_error(num), stats::std_error(den));
    let standard_error = if mn == 0.0 {
        sn / md.abs()
    } else {
        ratio.abs() * ((sn / mn).powi(2) + (sd / md).powi(2)).sqrt()
    };
    Ok(RatioEstimate { ratio, standard_error })
}

fn check_sets(enhanced: &[RunTrace], classical: &[RunTrace], step: usize) -> Result<()> {
    if enhanced.is_empty() || classical.is_empty() {
        return Err(Error::InvalidArgument("trace sets must be nonempty".into()));
    }
    let shortest = enhanced.iter().chain(classical).map(|t| t.best_value_at_step.len()).min().unwrap_or(0);
    if step == 0 || step > shortest {
        return Err(Error::InvalidArgument(format!("step {step} outside trace range 1..={shortest}")));
    }
    Ok(())
}

/// Mean enhanced best at `at_step` over mean classical best at `at_step`.
pub fn score_advantage(enhanced: &[RunTrace], classical: &[RunTrace], at_step: usize) -> Result<RatioEstimate> {
    check_sets(enhanced, classical, at_step)?;
    let e: Vec<f64> = enhanced.iter().map(|t| t.best_at(at_step)).collect();
    let c: Vec<f64> = classical.iter().map(|t| t.best_at(at_step)).collect();
    ratio_of_means(&e, &c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedAdvantage {
    pub ratio: f64,
    pub standard_error: f64,
    /// Enhanced trials that missed their target within the budget; each is
    /// counted at the budget.
    pub censored: usize,
}

/// Mean classical steps-to-target over mean enhanced steps-to-target, where
/// trial `i`'s target is what classical trace `i` reached at `budget`.
/// Trace sets are paired by index.
pub fn speed_advantage(enhanced: &[RunTrace], classical: &[RunTrace], budget: usize) -> Result<SpeedAdvantage> {
    if enhanced.len() != classical.len() {
        return Err(Error::InvalidArgument(format!(
            "speed advantage pairs trials: {} enhanced vs {} classical",
            enhanced.len(),
            classical.len()
        )));
    }
    check_sets(enhanced, classical, budget)?;
    let mut e_steps = Vec::with_capacity(enhanced.len());
    let mut c_steps = Vec::with_capacity(enhanced.len());
    let mut censored = 0;
    for (e, c) in enhanced.iter().zip(classical) {
        let target = c.best_at(budget);
        let cs = c.first_step_reaching(target).unwrap_or(budget);
        let es = match e.first_step_reaching(target) {
            Some(s) if s <= budget => s,
            _ => {
                censored += 1;
                budget
            }
        };
        c_steps.push(cs as f64);
        e_steps.push(es as f64);
    }
    let r = ratio_of_means(&c_steps, &e_steps)?;
    Ok(SpeedAdvantage { ratio: r.ratio, standard_error: r.standard_error, censored })
}

/// Ratio of mean step counts, for callers that already hold step data.
pub fn speed_advantage_from_steps(enhanced_steps: &[u64], classical_steps: &[u64]) -> Result<RatioEstimate> {
    if enhanced_steps.is_empty() || classical_steps.is_empty() {
        return Err(Error::InvalidArgument("step sets must be nonempty".into()));
    }
    let e: Vec<f64> = enhanced_steps.iter().map(|&s| s as f64).collect();
    let c: Vec<f64> = classical_steps.iter().map(|&s| s as f64).collect();
    ratio_of_means(&c, &e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub photon_click_k: usize,
    pub score_advantage: f64,
    pub speed_advantage: f64,
    pub trials: usize,
    /// Standard error of the score advantage.
    pub standard_error: f64,
    pub speed_standard_error: f64,
    pub speed_censored: usize,
    pub enhanced_mean_best: f64,
    pub classical_mean_best: f64,
    /// One-sided Welch z of enhanced over classical best values.
    pub welch_z: f64,
    pub pool_size: usize,
    pub pool_draws: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvantageConfig {
    pub objective: ObjectiveKind,
    pub k_values: Vec<usize>,
    /// Post-selected pool size per `k`.
    pub pool_size: usize,
    /// Raw sample cap per `k`.
    pub max_draws: usize,
    /// Step budget of every search run.
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Encoded-device pool with mean clicks tuned to `k`, post-selected to `k`.
pub fn encoded_pool(
    graph: &Graph,
    k: usize,
    noise: NoiseConfig,
    pool_size: usize,
    max_draws: usize,
    seed: u64,
) -> Result<(SamplePool, usize, f64)> {
    let scale = choose_scale(graph, k as f64)?;
    let state = noise.apply(&encode_graph(graph, scale)?.state()?)?;
    let drawn = sample_postselected(&state, k, pool_size, max_draws, seed)?;
    Ok((drawn.pool, drawn.draws, scale))
}

/// Runs `trials` random searches with per-trial seeds derived from `seed`.
pub fn search_trials(obj: &Objective, source: &ProposalSource, steps: usize, trials: usize, seed: u64) -> Result<Vec<RunTrace>> {
    (0..trials)
        .into_par_iter()
        .map(|t| random_search(obj, source, steps, derive_seed(seed, &[t as u64])))
        .collect()
}

/// Pool-fed against uniform random search for every `k` in the config.
pub fn advantage_study(graph: &Graph, cfg: &AdvantageConfig) -> Result<Vec<AdvantageReport>> {
    if cfg.trials == 0 || cfg.steps == 0 {
        return Err(Error::Config("trials and steps must be positive".into()));
    }
    let mut out = Vec::with_capacity(cfg.k_values.len());
    for &k in &cfg.k_values {
        let obj = Objective::new(cfg.objective, graph.clone(), k)?;
        let (pool, pool_draws, scale) =
            encoded_pool(graph, k, NoiseConfig::default(), cfg.pool_size, cfg.max_draws, derive_seed(cfg.seed, &[k as u64, 0]))?;
        let pool_size = pool.len();
        let source = ProposalSource::pool(pool, k)?;
        let enhanced = search_trials(&obj, &source, cfg.steps, cfg.trials, derive_seed(cfg.seed, &[k as u64, 1]))?;
        let classical = search_trials(&obj, &ProposalSource::Uniform, cfg.steps, cfg.trials, derive_seed(cfg.seed, &[k as u64, 2]))?;
        let score = score_advantage(&enhanced, &classical, cfg.steps)?;
        let speed = speed_advantage(&enhanced, &classical, cfg.steps)?;
        let e: Vec<f64> = enhanced.iter().map(|t| t.best_at(cfg.steps)).collect();
        let c: Vec<f64> = classical.iter().map(|t| t.best_at(cfg.steps)).collect();
        out.push(AdvantageReport {
            photon_click_k: k,
            score_advantage: score.ratio,
            speed_advantage: speed.ratio,
            trials: cfg.trials,
            standard_error: score.standard_error,
            speed_standard_error: speed.standard_error,
            speed_censored: speed.censored,
            enhanced_mean_best: stats::mean(&e),
            classical_mean_best: stats::mean(&c),
            welch_z: stats::welch_z(&e, &c),
            pool_size,
            pool_draws,
            scale,
        });
    }
    Ok(out)
}

pub fn advantage_csv(reports: &[AdvantageReport]) -> String {
    let mut out = String::from(
        "photon_click_k,score_advantage,speed_advantage,trials,standard_error,speed_standard_error,\
         speed_censored,enhanced_mean_best,classical_mean_best,welch_z,pool_size,pool_draws,scale\n",
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.photon_click_k,
            r.score_advantage,
            r.speed_advantage,
            r.trials,
            r.standard_error,
            r.speed_standard_error,
            r.speed_censored,
            r.enhanced_mean_best,
            r.classical_mean_best,
            r.welch_z,
            r.pool_size,
            r.pool_draws,
            r.scale
        );
    }
    out
}

// ---------------------------------------------------------------------------
// geometric fit

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricFit {
    pub p_hat: f64,
    pub n_trials: usize,
    /// Normal-approximation 95% interval, clipped to `[0, 1]`.
    pub ci95: (f64, f64),
}

impl GeometricFit {
    /// `p̂ sqrt((1 - p̂)/n)`, the delta-method error of `1/mean`.
    pub fn standard_error(&self) -> f64 {
        self.p_hat * ((1.0 - self.p_hat) / self.n_trials as f64).sqrt()
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci95.0 <= p && p <= self.ci95.1
    }

    /// One-sided z statistic for `self.p_hat > other.p_hat`.
    pub fn z_greater_than(&self, other: &GeometricFit) -> f64 {
        let se = self.standard_error().hypot(other.standard_error());
        let diff = self.p_hat - other.p_hat;
        if se == 0.0 {
            return if diff > 0.0 { f64::INFINITY } else if diff < 0.0 { f64::NEG_INFINITY } else { 0.0 };
        }
        diff / se
    }
}

/// Maximum-likelihood success probability of first-success step counts.
pub fn geometric_fit(steps: &[u64]) -> Result<GeometricFit> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("geometric fit needs at least one step count".into()));
    }
    if steps.contains(&0) {
        return Err(Error::InvalidArgument("step counts start at 1".into()));
    }
    let mean = steps.iter().map(|&s| s as f64).sum::<f64>() / steps.len() as f64;
    let p_hat = 1.0 / mean;
    let mut fit = GeometricFit { p_hat, n_trials: steps.len(), ci95: (p_hat, p_hat) };
    let half = Z_95_TWO_SIDED * fit.standard_error();
    fit.ci95 = ((p_hat - half).max(0.0), (p_hat + half).min(1.0));
    Ok(fit)
}

/// Step of first success for success probability `p`, by inversion.
pub fn geometric_draw(p: f64, rng: &mut impl Rng) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    (u.ln() / (1.0 - p).ln()).floor() as u64 + 1
}

// ---------------------------------------------------------------------------
// noise sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSweepConfig {
    pub objective: ObjectiveKind,
    pub k: usize,
    pub eta_grid: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    /// Raw sample cap per grid point.
    pub max_draws: usize,
    /// Uniform random-search budget that defines the target.
    pub target_steps: usize,
    /// Uniform runs averaged into the target.
    pub target_trials: usize,
    /// Pool-fed search budget; trials missing the target are censored.
    pub budget: usize,
    pub trials: usize,
    pub seed: u64,
    /// Re-tune the scale at every grid point so the noisy device, not the
    /// lossless one, averages `k` clicks.
    #[serde(default)]
    pub match_clicks: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub eta: f64,
    pub epsilon: f64,
    pub scale: f64,
    /// `None` when no trial reached the target.
    pub p_hat: Option<f64>,
    pub ci95_lo: Option<f64>,
    pub ci95_hi: Option<f64>,
    /// Uncensored trials used by the fit.
    pub n_trials: usize,
    pub censored: usize,
    pub censored_fraction: f64,
    pub no_success: bool,
    /// Post-selected patterns consumed by all trials together.
    pub patterns_used: usize,
    /// Raw samples behind them.
    pub draws: usize,
    /// The raw sample cap ran out before every trial finished.
    pub exhausted: bool,
}

impl NoisePoint {
    pub fn fit(&self) -> Option<GeometricFit> {
        Some(GeometricFit { p_hat: self.p_hat?, n_trials: self.n_trials, ci95: (self.ci95_lo?, self.ci95_hi?) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepReport {
    pub target: f64,
    pub scale: f64,
    pub points: Vec<NoisePoint>,
}

/// Steps-to-target of pool-fed random search over the `eta × epsilon` grid.
///
/// The target is the mean best of uniform search at `target_steps`. At each
/// grid point the noisy device feeds one stream of `k`-click samples; trials
/// consume it back to back, so every trial sees fresh samples and its step
/// count is an independent geometric draw. A trial stops at the first sample
/// reaching the target and is censored after `budget` samples.
pub fn noise_sweep(graph: &Graph, cfg: &NoiseSweepConfig) -> Result<NoiseSweepReport> {
    let grid_ok = |g: &[f64]| !g.is_empty() && g.iter().all(|x| (0.0..=1.0).contains(x));
    if !grid_ok(&cfg.eta_grid) || !grid_ok(&cfg.epsilon_grid) {
        return Err(Error::Config("eta_grid and epsilon_grid must be nonempty with values in [0, 1]".into()));
    }
    if cfg.trials == 0 || cfg.budget == 0 || cfg.target_steps == 0 || cfg.target_trials == 0 {
        return Err(Error::Config("trials, budget, target_steps and target_trials must be positive".into()));
    }
    let obj = Objective::new(cfg.objective, graph.clone(), cfg.k)?;
    let classical = search_trials(&obj, &ProposalSource::Uniform, cfg.target_steps, cfg.target_trials, derive_seed(cfg.seed, &[0]))?;
    let target = stats::mean(&classical.iter().map(|t| t.best_value()).collect::<Vec<_>>());

    let scale = choose_scale(graph, cfg.k as f64)?;
    let clean = encode_graph(graph, scale)?.state()?;
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut points = Vec::new();
    for (gi, &eta) in cfg.eta_grid.iter().enumerate() {
        for (gj, &epsilon) in cfg.epsilon_grid.iter().enumerate() {
            let noise = NoiseConfig::new(eta, epsilon)?;
            let (point_scale, state) = if cfg.match_clicks && eta > 0.0 {
                let c = choose_scale_with_noise(graph, cfg.k as f64, noise)?;
                (c, noise.apply(&encode_graph(graph, c)?.state()?)?)
            } else {
                (scale, noise.apply(&clean)?)
            };
            let mut stream = PostselectedStream::new(&state, cfg.k, derive_seed(cfg.seed, &[1, gi as u64, gj as u64]), cfg.max_draws)?;
            let mut steps = Vec::new();
            let mut patterns_used = 0;
            let mut exhausted = false;
            'trials: for _ in 0..cfg.trials {
                for step in 1..=cfg.budget {
                    let Some(pattern) = stream.next_pattern()? else {
                        exhausted = true;
                        break 'trials;
                    };
                    patterns_used += 1;
                    let subset = pattern.clicked();
                    let value = match cache.get(&subset) {
                        Some(&v) => v,
                        None => {
                            let v = obj.value(&subset)?;
                            cache.insert(subset, v);
                            v
                        }
                    };
                    if value >= target {
                        steps.push(step as u64);
                        break;
                    }
                }
            }
            let censored = cfg.trials - steps.len();
            let fit = if steps.is_empty() { None } else { Some(geometric_fit(&steps)?) };
            points.push(NoisePoint {
                eta,
                epsilon,
                scale: point_scale,
                p_hat: fit.map(|f| f.p_hat),
                ci95_lo: fit.map(|f| f.ci95.0),
                ci95_hi: fit.map(|f| f.ci95.1),
                n_trials: steps.len(),
                censored,
                censored_fraction: censored as f64 / cfg.trials as f64,
                no_success: fit.is_none(),
                patterns_used,
                draws: stream.draws_consumed(),
                exhausted,
            });
        }
    }
    Ok(NoiseSweepReport { target, scale, points })
}

pub fn noise_csv(points: &[NoisePoint]) -> String {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from(
        "eta,epsilon,scale,p_hat,ci95_lo,ci95_hi,n_trials,censored,censored_fraction,no_success,patterns_used,draws,exhausted\n",
    );
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.eta,
            p.epsilon,
            p.scale,
            opt(p.p_hat),
            opt(p.ci95_lo),
            opt(p.ci95_hi),
            p.n_trials,
            p.censored,
            p.censored_fraction,
            p.no_success,
            p.patterns_used,
            p.draws,
            p.exhausted
        );
    }
    out
}
