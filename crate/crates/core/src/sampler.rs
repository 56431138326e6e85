//! Exact threshold-detector sampling by the mode-by-mode chain rule, plus
//! sample pools and their text format.
//!
//! Sample files are UTF-8: a `modes=M` header, then one `M`-character 0/1
//! string per line (bit `i` is mode `i`). Lines starting with `#` are
//! comments; `# seed=` and `# provenance=` comments carry pool metadata.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::io::write_atomic;
use crate::matfn::torontonian_quadrature;
use crate::numerics::{inverse, ComplexMatrix, C64};

pub use crate::pattern::ClickPattern;

/// Largest device the sampler accepts.
pub const MAX_SAMPLER_MODES: usize = 24;
/// Largest expected click count the sampler accepts.
pub const MAX_EXPECTED_CLICKS: f64 = 14.0;

const FORMAT_VERSION: u32 = 1;

/// Ordered collection of click patterns of a common length.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePool {
    pub modes: usize,
    pub samples: Vec<ClickPattern>,
    /// Free-form description of where the samples came from.
    pub provenance: String,
    pub seed: Option<u64>,
}

impl SamplePool {
    pub fn new(modes: usize, samples: Vec<ClickPattern>, provenance: impl Into<String>, seed: Option<u64>) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|p| p.len() != modes) {
            return Err(Error::DimensionMismatch(format!(
                "pattern of length {} in a {modes}-mode pool",
                bad.len()
            )));
        }
        Ok(Self { modes, samples, provenance: provenance.into(), seed })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_clicks(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|p| p.clicks()).sum::<usize>() as f64 / self.samples.len() as f64
    }

    /// Number of samples per click count, index = clicks.
    pub fn click_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.modes + 1];
        for p in &self.samples {
            h[p.clicks()] += 1;
        }
        h
    }
}

/// Precomputed prefix marginals of one state: for every prefix length `k`,
/// `(σ_Q^{(k)})⁻¹` in real quadrature form and `sqrt(det σ_Q^{(k)})`.
pub struct ChainSampler {
    modes: usize,
    prefix_form: Vec<Vec<f64>>,
    prefix_sqrt_det: Vec<f64>,
}

/// Tolerance on the imaginary residue of a quadrature form, relative to its
/// largest entry.
const QUADRATURE_IMAG_TOL: f64 = 1e-9;

/// `T M T†` with `T = [[I, I], [-iI, iI]]/√2`: a Hermitian form in
/// `(a, a†)` ordering rewritten in `(x, p)` ordering, where it is real.
fn quadrature_form(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let k = m.rows() / 2;
    let i = C64::new(0.0, 1.0);
    let mut out = vec![0.0; 4 * k * k];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for r in 0..k {
        for c in 0..k {
            let (m11, m12, m21, m22) = (m[(r, c)], m[(r, c + k)], m[(r + k, c)], m[(r + k, c + k)]);
            let (p, q) = (m11 + m21, m12 + m22);
            let (u, v) = ((m11 - m21) * -i, (m12 - m22) * -i);
            let block = [(p + q) * 0.5, (p - q) * i * 0.5, (u + v) * 0.5, (u - v) * i * 0.5];
            let at = [(r, c), (r, c + k), (r + k, c), (r + k, c + k)];
            for (z, (a, b)) in block.into_iter().zip(at) {
                worst = worst.max(z.im.abs());
                scale = scale.max(z.re.abs());
                out[a * 2 * k + b] = z.re;
            }
        }
    }
    if worst > QUADRATURE_IMAG_TOL * scale.max(1.0) {
        return Err(Error::Unphysical(format!("quadrature form has imaginary residue {worst:.3e}")));
    }
    Ok(out)
}

impl ChainSampler {
    pub fn new(state: &GaussianState) -> Result<Self> {
        let m = state.modes();
        if m > MAX_SAMPLER_MODES {
            return Err(Error::CostGuard(format!(
                "{m} modes exceeds the sampler limit of {MAX_SAMPLER_MODES}"
            )));
        }
        let expected = state.expected_clicks();
        if expected > MAX_EXPECTED_CLICKS {
            return Err(Error::CostGuard(format!(
                "expected click count {expected:.3} exceeds the sampler limit of {MAX_EXPECTED_CLICKS}"
            )));
        }
        let mut prefix_form = Vec::with_capacity(m);
        let mut prefix_sqrt_det = Vec::with_capacity(m);
        for k in 1..=m {
            let keep: Vec<usize> = (0..k).collect();
            let reduced = state.reduce(&keep)?;
            prefix_form.push(quadrature_form(&inverse(reduced.husimi())?)?);
            prefix_sqrt_det.push(reduced.husimi_det()?.sqrt());
        }
        Ok(Self { modes: m, prefix_form, prefix_sqrt_det })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Marginal probability that modes `0..len` show exactly the clicks in
    /// `clicked` (all below `len`).
    pub fn prefix_probability(&self, len: usize, clicked: &[usize]) -> Result<f64> {
        if len == 0 {
            return Ok(1.0);
        }
        let tor = torontonian_quadrature(&self.prefix_form[len - 1], len, clicked)?;
        Ok(tor / self.prefix_sqrt_det[len - 1])
    }

    /// Draws one pattern. Returns it with the chain of conditional
    /// probabilities of the outcomes taken.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Result<(ClickPattern, Vec<f64>)> {
        let mut bits = Vec::with_capacity(self.modes);
        let mut clicked = Vec::new();
        let mut conditionals = Vec::with_capacity(self.modes);
        let mut p_prefix = 1.0;
        for k in 0..self.modes {
            let p_dark = self.prefix_probability(k + 1, &clicked)?;
            let p_click = if p_prefix > 0.0 { (1.0 - p_dark / p_prefix).clamp(0.0, 1.0) } else { 0.0 };
            let click = rng.random::<f64>() < p_click;
            if click {
                clicked.push(k);
                conditionals.push(p_click);
                p_prefix = (p_prefix - p_dark).max(0.0);
            } else {
                conditionals.push(1.0 - p_click);
                p_prefix = p_dark;
            }
            bits.push(click);
        }
        Ok((ClickPattern::new(bits), conditionals))
    }
}

/// RNG for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `count` i.i.d. exact samples. Sample `i` uses its own RNG stream, so the
/// pool does not depend on scheduling.
pub fn sample(state: &GaussianState, count: usize, seed: u64) -> Result<SamplePool> {
    let chain = ChainSampler::new(state)?;
    let samples = (0..count)
        .into_par_iter()
        .map(|i| chain.draw(&mut sample_rng(seed, i as u64)).map(|(p, _)| p))
        .collect::<Result<Vec<_>>>()?;
    SamplePool::new(state.modes(), samples, format!("simulated modes={} count={count}", state.modes()), Some(seed))
}

/// The patterns with exactly `k` clicks, order preserved.
/// Result of [`sample_postselected`].
#[derive(Debug, Clone)]
pub struct PostselectedPool {
    /// Up to `want` patterns with exactly `k` clicks, in draw order.
    pub pool: SamplePool,
    /// Raw samples drawn to fill it.
    pub draws: usize,
}

const POSTSELECT_BATCH: usize = 2048;

/// Endless supply of `k`-click patterns from one state. Raw sample `i` uses
/// `sample_rng(seed, i)` and patterns come out in index order, so the
/// sequence does not depend on thread count or batch size.
pub struct PostselectedStream {
    chain: ChainSampler,
    k: usize,
    seed: u64,
    max_draws: usize,
    drawn: usize,
    buffer: VecDeque<(usize, ClickPattern)>,
    consumed: usize,
}

impl PostselectedStream {
    pub fn new(state: &GaussianState, k: usize, seed: u64, max_draws: usize) -> Result<Self> {
        let m = state.modes();
        if k > m {
            return Err(Error::InvalidArgument(format!("cannot post-select {k} clicks from {m} modes")));
        }
        Ok(Self { chain: ChainSampler::new(state)?, k, seed, max_draws, drawn: 0, buffer: VecDeque::new(), consumed: 0 })
    }

    /// Next `k`-click pattern, or `None` once `max_draws` raw samples are spent.
    pub fn next_pattern(&mut self) -> Result<Option<ClickPattern>> {
        while self.buffer.is_empty() && self.drawn < self.max_draws {
            let batch = POSTSELECT_BATCH.min(self.max_draws - self.drawn);
            let (chain, seed, k) = (&self.chain, self.seed, self.k);
            let found = (self.drawn..self.drawn + batch)
                .into_par_iter()
                .map(|i| chain.draw(&mut sample_rng(seed, i as u64)).map(|(p, _)| (i, p)))
                .collect::<Result<Vec<_>>>()?;
            self.buffer.extend(found.into_iter().filter(|(_, p)| p.clicks() == k));
            self.drawn += batch;
        }
        Ok(self.buffer.pop_front().map(|(i, p)| {
            self.consumed = i + 1;
            p
        }))
    }

    /// Raw samples behind the patterns handed out so far (the index of the
    /// last one plus one).
    pub fn draws_consumed(&self) -> usize {
        self.consumed
    }

    /// Raw samples drawn so far, including buffered ones.
    pub fn draws_total(&self) -> usize {
        self.drawn
    }
}

/// Collects up to `want` patterns with exactly `k` clicks, spending at most
/// `max_draws` raw samples.
pub fn sample_postselected(
    state: &GaussianState,
    k: usize,
    want: usize,
    max_draws: usize,
    seed: u64,
) -> Result<PostselectedPool> {
    let mut stream = PostselectedStream::new(state, k, seed, max_draws)?;
    let mut kept = Vec::with_capacity(want.min(1 << 16));
    while kept.len() < want {
        match stream.next_pattern()? {
            Some(p) => kept.push(p),
            None => break,
        }
    }
    let draws = if kept.len() == want { stream.draws_consumed() } else { stream.draws_total() };
    let m = state.modes();
    let provenance = format!("simulated modes={m} postselected k={k} draws={draws}");
    Ok(PostselectedPool { pool: SamplePool::new(m, kept, provenance, Some(seed))?, draws })
}

pub fn postselect(pool: &SamplePool, k: usize) -> Result<SamplePool> {
    if k > pool.modes {
        return Err(Error::InvalidArgument(format!("click count {k} exceeds {} modes", pool.modes)));
    }
    let samples = pool.samples.iter().filter(|p| p.clicks() == k).cloned().collect();
    Ok(SamplePool {
        modes: pool.modes,
        samples,
        provenance: format!("{} postselect={k}", pool.provenance),
        seed: pool.seed,
    })
}

pub fn format_pool(pool: &SamplePool) -> String {
    let mut out = String::with_capacity(pool.samples.len() * (pool.modes + 1) + 64);
    let _ = writeln!(out, "modes={}", pool.modes);
    let _ = writeln!(out, "# format_version={FORMAT_VERSION}");
    if let Some(seed) = pool.seed {
        let _ = writeln!(out, "# seed={seed}");
    }
    if !pool.provenance.is_empty() {
        let _ = writeln!(out, "# provenance={}", pool.provenance.replace('\n', " "));
    }
    for p in &pool.samples {
        let _ = writeln!(out, "{p}");
    }
    out
}

pub fn parse_pool(text: &str, origin: &str) -> Result<SamplePool> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
    let mut modes: Option<usize> = None;
    let mut seed = None;
    let mut provenance = None;
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim_start();
            if let Some(v) = comment.strip_prefix("seed=") {
                seed = Some(v.trim().parse::<u64>().map_err(|e| err(lineno, format!("bad seed: {e}")))?);
            } else if let Some(v) = comment.strip_prefix("provenance=") {
                provenance = Some(v.to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match modes {
            None => {
                let v = line
                    .strip_prefix("modes=")
                    .ok_or_else(|| err(lineno, "expected header `modes=M`".into()))?;
                let m = v.trim().parse::<usize>().map_err(|e| err(lineno, format!("bad mode count: {e}")))?;
                if m == 0 {
                    return Err(err(lineno, "mode count must be positive".into()));
                }
                modes = Some(m);
            }
            Some(m) => {
                let p: ClickPattern = line.parse().map_err(|e| err(lineno, e))?;
                if p.len() != m {
                    return Err(err(lineno, format!("pattern has {} bits, header says {m}", p.len())));
                }
                samples.push(p);
            }
        }
    }
    let modes = modes.ok_or_else(|| err(0, "missing `modes=M` header".into()))?;
    let provenance = provenance.unwrap_or_else(|| format!("file {origin}"));
    Ok(SamplePool { modes, samples, provenance, seed })
}

pub fn save_pool(pool: &SamplePool, path: &Path) -> Result<()> {
    write_atomic(path, format_pool(pool).as_bytes())
}

pub fn load_pool(path: &Path) -> Result<SamplePool> {
    let text = std::fs::read_to_string(path)?;
    parse_pool(&text, &path.display().to_string())
}
