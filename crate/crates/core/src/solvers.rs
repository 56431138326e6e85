//! Max-Haf and dense k-subgraph objectives with random search, simulated
//! annealing (both optionally fed by GBS sample pools) and greedy peeling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matfn::{hafnian, MAX_HAFNIAN_DIM};
use crate::numerics::C64;
use crate::sampler::SamplePool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// `|Haf(Δ_S)|²`
    MaxHaf,
    /// `|Σ_ij (Δ_S)_ij|`
    Density,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::MaxHaf => "max-haf",
            ObjectiveKind::Density => "density",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-haf" | "maxhaf" | "hafnian" => Ok(ObjectiveKind::MaxHaf),
            "density" => Ok(ObjectiveKind::Density),
            other => Err(Error::InvalidArgument(format!("unknown objective {other:?}"))),
        }
    }
}

/// A size-`k` subgraph search problem on `graph`.
#[derive(Debug, Clone)]
pub struct Objective {
    kind: ObjectiveKind,
    graph: Graph,
    k: usize,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, graph: Graph, k: usize) -> Result<Self> {
        let n = graph.n();
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!("subgraph size k = {k} must satisfy 0 < k < n = {n}")));
        }
        if kind == ObjectiveKind::MaxHaf {
            if k % 2 == 1 {
                return Err(Error::InvalidArgument(format!("max-haf needs an even k, got {k}")));
            }
            if k > MAX_HAFNIAN_DIM {
                return Err(Error::CostGuard(format!("max-haf with k = {k} exceeds the hafnian limit")));
            }
        }
        Ok(Self { kind, graph, k })
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Objective value of a sorted, validated subset (no memo).
    pub fn value(&self, subset: &[usize]) -> Result<f64> {
        match self.kind {
            ObjectiveKind::Density => density(&self.graph, subset),
            ObjectiveKind::MaxHaf => {
                self.graph.check_subset(subset)?;
                Ok(hafnian(&self.graph.adjacency().principal(subset))?.norm_sqr())
            }
        }
    }
}

/// Per-run evaluator; memoizes hafnians by subset.
struct Evaluator<'a> {
    obj: &'a Objective,
    cache: HashMap<Vec<usize>, f64>,
}

impl<'a> Evaluator<'a> {
    fn new(obj: &'a Objective) -> Self {
        Self { obj, cache: HashMap::new() }
    }

    fn eval(&mut self, subset: &[usize]) -> Result<f64> {
        if self.obj.kind == ObjectiveKind::Density {
            return self.obj.value(subset);
        }
        if let Some(&v) = self.cache.get(subset) {
            return Ok(v);
        }
        let v = self.obj.value(subset)?;
        self.cache.insert(subset.to_vec(), v);
        Ok(v)
    }
}

/// `W(G_S) = |Σ_{i,j ∈ S} Δ_ij|`, both orders of each edge and the stored
/// diagonal included.
pub fn density(g: &Graph, subset: &[usize]) -> Result<f64> {
    g.check_subset(subset)?;
    let mut total = C64::new(0.0, 0.0);
    for &i in subset {
        for &j in subset {
            total += g.weight(i, j);
        }
    }
    Ok(total.norm())
}

/// Where candidate subsets come from.
#[derive(Debug, Clone)]
pub enum ProposalSource {
    Uniform,
    /// Post-selected pool, every pattern with exactly `k` clicks.
    Pool(SamplePool),
}

impl ProposalSource {
    /// Checks that `pool` is nonempty and post-selected to `k` clicks.
    pub fn pool(pool: SamplePool, k: usize) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::InvalidArgument("sample pool is empty".into()));
        }
        if let Some(p) = pool.samples.iter().find(|p| p.clicks() != k) {
            return Err(Error::InvalidArgument(format!(
                "pool pattern {p} has {} clicks, expected {k}",
                p.clicks()
            )));
        }
        Ok(ProposalSource::Pool(pool))
    }

    fn check(&self, obj: &Objective) -> Result<()> {
        if let ProposalSource::Pool(pool) = self {
            if pool.modes != obj.graph.n() {
                return Err(Error::DimensionMismatch(format!(
                    "pool has {} modes, graph has {} vertices",
                    pool.modes,
                    obj.graph.n()
                )));
            }
            if pool.is_empty() {
                return Err(Error::InvalidArgument("sample pool is empty".into()));
            }
            if pool.samples.iter().any(|p| p.clicks() != obj.k) {
                return Err(Error::InvalidArgument(format!("pool is not post-selected to k = {}", obj.k)));
            }
        }
        Ok(())
    }

    pub fn is_pool(&self) -> bool {
        matches!(self, ProposalSource::Pool(_))
    }
}

/// Pool traversal: a seed-determined permutation walked sequentially,
/// wrapping around when exhausted.
struct PoolCursor<'a> {
    pool: &'a SamplePool,
    order: Vec<usize>,
    pos: usize,
    wrapped: bool,
}

impl<'a> PoolCursor<'a> {
    fn new(pool: &'a SamplePool, rng: &mut impl Rng) -> Self {
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.shuffle(rng);
        Self { pool, order, pos: 0, wrapped: false }
    }

    fn next_subset(&mut self) -> Vec<usize> {
        if self.pos == self.order.len() {
            self.pos = 0;
            self.wrapped = true;
        }
        let idx = self.order[self.pos];
        self.pos += 1;
        self.pool.samples[idx].clicked()
    }
}

enum Proposer<'a> {
    Uniform { n: usize, k: usize },
    Pool(PoolCursor<'a>),
}

impl<'a> Proposer<'a> {
    fn new(source: &'a ProposalSource, obj: &Objective, rng: &mut impl Rng) -> Self {
        match source {
            ProposalSource::Uniform => Proposer::Uniform { n: obj.graph.n(), k: obj.k },
            ProposalSource::Pool(pool) => Proposer::Pool(PoolCursor::new(pool, rng)),
        }
    }

    fn draw(&mut self, rng: &mut impl Rng) -> Vec<usize> {
        match self {
            Proposer::Uniform { n, k } => {
                let mut s = rand::seq::index::sample(rng, *n, *k).into_vec();
                s.sort_unstable();
                s
            }
            Proposer::Pool(cursor) => cursor.next_subset(),
        }
    }

    fn wrapped(&self) -> bool {
        matches!(self, Proposer::Pool(c) if c.wrapped)
    }
}

/// Best-so-far history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// `(step, best value after that step)`, steps numbered from 1.
    pub best_value_at_step: Vec<(usize, f64)>,
    pub best_subset: Vec<usize>,
    pub steps_used: usize,
    pub seed: u64,
    /// True when a pool source was exhausted and restarted.
    pub pool_wrapped: bool,
}

impl RunTrace {
    pub fn best_value(&self) -> f64 {
        self.best_value_at_step.last().map(|&(_, v)| v).unwrap_or(f64::NEG_INFINITY)
    }

    /// Best value after `step` steps (1-based, clamped to the trace).
    pub fn best_at(&self, step: usize) -> f64 {
        let idx = step.clamp(1, self.best_value_at_step.len()) - 1;
        self.best_value_at_step[idx].1
    }

    /// First step whose best-so-far reaches `target`.
    pub fn first_step_reaching(&self, target: f64) -> Option<usize> {
        self.best_value_at_step.iter().find(|&&(_, v)| v >= target).map(|&(s, _)| s)
    }
}

struct TraceBuilder {
    steps: Vec<(usize, f64)>,
    best: f64,
    best_subset: Vec<usize>,
}

impl TraceBuilder {
    fn new(steps: usize) -> Self {
        Self { steps: Vec::with_capacity(steps), best: f64::NEG_INFINITY, best_subset: Vec::new() }
    }

    fn record(&mut self, subset: &[usize], value: f64) {
        if value > self.best {
            self.best = value;
            self.best_subset = subset.to_vec();
        }
        self.steps.push((self.steps.len() + 1, self.best));
    }

    fn finish(self, seed: u64, pool_wrapped: bool) -> RunTrace {
        RunTrace {
            steps_used: self.steps.len(),
            best_value_at_step: self.steps,
            best_subset: self.best_subset,
            seed,
            pool_wrapped,
        }
    }
}

/// Random search: one fresh candidate per step, keep the best.
pub fn random_search(obj: &Objective, source: &ProposalSource, steps: usize, seed: u64) -> Result<RunTrace> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    source.check(obj)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut proposer = Proposer::new(source, obj, &mut rng);
    let mut eval = Evaluator::new(obj);
    let mut trace = TraceBuilder::new(steps);
    for _ in 0..steps {
        let s = proposer.draw(&mut rng);
        let v = eval.eval(&s)?;
        trace.record(&s, v);
    }
    Ok(trace.finish(seed, proposer.wrapped()))
}

/// Geometric cooling `T_t = t0 · alpha^t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t0: f64,
    pub alpha: f64,
}

impl Schedule {
    pub fn new(t0: f64, alpha: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) || !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "schedule needs t0 > 0 and 0 < alpha < 1, got t0 = {t0}, alpha = {alpha}"
            )));
        }
        Ok(Self { t0, alpha })
    }

    pub fn temperature(&self, t: usize) -> f64 {
        self.t0 * self.alpha.powi(t.min(i32::MAX as usize) as i32)
    }
}

/// Simulated annealing over `k`-subsets.
///
/// The first step evaluates an initial draw from `source`. Each later step
/// proposes, with probability `jump_prob` (pool sources only), the next pool
/// pattern, and otherwise a swap of one inside vertex for one outside vertex.
/// Worse proposals are accepted with probability `exp(-(v_cur - v_prop)/T_t)`.
pub fn simulated_annealing(
    obj: &Objective,
    source: &ProposalSource,
    steps: usize,
    schedule: Schedule,
    jump_prob: f64,
    seed: u64,
) -> Result<RunTrace> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let schedule = Schedule::new(schedule.t0, schedule.alpha)?;
    if !(0.0..1.0).contains(&jump_prob) {
        return Err(Error::InvalidArgument(format!("jump_prob = {jump_prob} must lie in [0, 1)")));
    }
    let jump_prob = if source.is_pool() { jump_prob } else { 0.0 };
    source.check(obj)?;

    let n = obj.graph.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut proposer = Proposer::new(source, obj, &mut rng);
    let mut eval = Evaluator::new(obj);
    let mut trace = TraceBuilder::new(steps);

    let mut current = proposer.draw(&mut rng);
    let mut v_cur = eval.eval(&current)?;
    trace.record(&current, v_cur);
    let mut inside = vec![false; n];
    for &v in &current {
        inside[v] = true;
    }

    for t in 0..steps - 1 {
        let candidate = if jump_prob > 0.0 && rng.random::<f64>() < jump_prob {
            proposer.draw(&mut rng)
        } else {
            let out_pos = rng.random_range(0..current.len());
            let outside_count = n - current.len();
            let mut pick = rng.random_range(0..outside_count);
            let mut incoming = 0;
            for (v, &is_in) in inside.iter().enumerate() {
                if !is_in {
                    if pick == 0 {
                        incoming = v;
                        break;
                    }
                    pick -= 1;
                }
            }
            let mut c = current.clone();
            c[out_pos] = incoming;
            c.sort_unstable();
            c
        };
        let v_prop = eval.eval(&candidate)?;
        let accept = v_prop >= v_cur || {
            let temp = schedule.temperature(t);
            rng.random::<f64>() < (-(v_cur - v_prop) / temp).exp()
        };
        if accept {
            for &v in &current {
                inside[v] = false;
            }
            for &v in &candidate {
                inside[v] = true;
            }
            current = candidate;
            v_cur = v_prop;
        }
        trace.record(&current, v_cur);
    }
    Ok(trace.finish(seed, proposer.wrapped()))
}

/// Greedy peeling: drop the vertex whose removal costs the least density
/// (smallest `2 Σ_{j≠i} Δ_ij + Δ_ii` over the remaining vertices), lowest
/// index on ties, until `k` remain. Defined for real nonnegative weights.
pub fn greedy_peel(g: &Graph, k: usize) -> Result<Vec<usize>> {
    let n = g.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("subgraph size k = {k} must satisfy 0 < k < n = {n}")));
    }
    if !g.is_real_nonnegative() {
        return Err(Error::InvalidArgument(
            "greedy peeling is only defined for real nonnegative weights".into(),
        ));
    }
    let w = |i: usize, j: usize| g.weight(i, j).re;
    let mut alive = vec![true; n];
    let mut loss: Vec<f64> = (0..n).map(|i| (0..n).map(|j| if i == j { w(i, i) } else { 2.0 * w(i, j) }).sum()).collect();
    for _ in 0..(n - k) {
        let mut victim = usize::MAX;
        for i in 0..n {
            if alive[i] && (victim == usize::MAX || loss[i] < loss[victim]) {
                victim = i;
            }
        }
        alive[victim] = false;
        for j in 0..n {
            if alive[j] {
                loss[j] -= 2.0 * w(j, victim);
            }
        }
    }
    Ok((0..n).filter(|&i| alive[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexMatrix;
    use crate::pattern::ClickPattern;

    fn complete(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn density_cases() {
        let g = complete(6);
        assert_eq!(density(&g, &[0, 1, 2, 3]).unwrap(), 12.0);
        let empty = Graph::from_edges(4, &[]).unwrap();
        assert_eq!(density(&empty, &[0, 1, 2]).unwrap(), 0.0);
        assert!(density(&g, &[0, 0]).is_err());

        let m = ComplexMatrix::from_fn(7, 7, |i, j| C64::new((i + j) as f64 * 0.3 - 1.0, (i * j) as f64 * 0.1));
        let g = Graph::new(m.symmetrized()).unwrap();
        let s = [0, 2, 3, 5, 6];
        let mut direct = C64::new(0.0, 0.0);
        for &i in &s {
            for &j in &s {
                direct += g.adjacency()[(i, j)];
            }
        }
        assert_eq!(density(&g, &s).unwrap(), direct.norm());
    }

    #[test]
    fn objective_validation() {
        assert!(Objective::new(ObjectiveKind::MaxHaf, complete(6), 3).is_err());
        assert!(Objective::new(ObjectiveKind::Density, complete(6), 6).is_err());
        assert!(Objective::new(ObjectiveKind::Density, complete(6), 0).is_err());
        assert!(Objective::new(ObjectiveKind::Density, complete(6), 3).is_ok());
        assert_eq!("max-haf".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::MaxHaf);
    }

    #[test]
    fn single_step_search() {
        let obj = Objective::new(ObjectiveKind::Density, star(5), 2).unwrap();
        let t = random_search(&obj, &ProposalSource::Uniform, 1, 4).unwrap();
        assert_eq!(t.steps_used, 1);
        assert_eq!(t.best_value(), density(obj.graph(), &t.best_subset).unwrap());
    }

    #[test]
    fn planted_pool_hits_at_step_one() {
        let obj = Objective::new(ObjectiveKind::Density, star(5), 2).unwrap();
        let pool = SamplePool::new(6, vec![ClickPattern::from_clicked(6, &[0, 3]).unwrap()], "", None).unwrap();
        let src = ProposalSource::pool(pool, 2).unwrap();
        let t = random_search(&obj, &src, 5, 0).unwrap();
        assert_eq!(t.best_at(1), 2.0);
        assert_eq!(t.first_step_reaching(2.0), Some(1));
        assert!(t.pool_wrapped);
    }

    #[test]
    fn pool_validation() {
        let empty = SamplePool::new(6, vec![], "", None).unwrap();
        assert!(ProposalSource::pool(empty, 2).is_err());
        let wrong = SamplePool::new(6, vec![ClickPattern::from_clicked(6, &[0]).unwrap()], "", None).unwrap();
        assert!(ProposalSource::pool(wrong, 2).is_err());
        let obj = Objective::new(ObjectiveKind::Density, star(5), 2).unwrap();
        let other = SamplePool::new(4, vec![ClickPattern::from_clicked(4, &[0, 1]).unwrap()], "", None).unwrap();
        let src = ProposalSource::pool(other, 2).unwrap();
        assert!(random_search(&obj, &src, 3, 0).is_err());
    }

    #[test]
    fn traces_are_monotone_and_deterministic() {
        let m = ComplexMatrix::from_fn(10, 10, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + j) % 3) as f64));
        let g = Graph::new(m.symmetrized()).unwrap();
        for kind in [ObjectiveKind::Density, ObjectiveKind::MaxHaf] {
            let obj = Objective::new(kind, g.clone(), 4).unwrap();
            let a = random_search(&obj, &ProposalSource::Uniform, 200, 9).unwrap();
            assert_eq!(a, random_search(&obj, &ProposalSource::Uniform, 200, 9).unwrap());
            let sched = Schedule::new(1.0, 0.99).unwrap();
            let b = simulated_annealing(&obj, &ProposalSource::Uniform, 200, sched, 0.0, 9).unwrap();
            assert_eq!(b, simulated_annealing(&obj, &ProposalSource::Uniform, 200, sched, 0.0, 9).unwrap());
            for t in [&a, &b] {
                assert!(t.best_value_at_step.windows(2).all(|w| w[1].1 >= w[0].1));
                assert_eq!(t.best_subset.len(), 4);
                assert_eq!(t.best_value_at_step.len(), 200);
            }
        }
    }

    #[test]
    fn annealing_hill_climbs_weighted_path() {
        // path 0-1-2-3 with edge weights 1, 2, 3: {2, 3} is the only swap-local optimum
        let mut m = ComplexMatrix::zeros(4, 4);
        for (i, w) in [(0, 1.0), (1, 2.0), (2, 3.0)] {
            m[(i, i + 1)] = C64::new(w, 0.0);
            m[(i + 1, i)] = C64::new(w, 0.0);
        }
        let obj = Objective::new(ObjectiveKind::Density, Graph::new(m).unwrap(), 2).unwrap();
        let sched = Schedule::new(1e-9, 0.99).unwrap();
        for seed in 0..20 {
            let t = simulated_annealing(&obj, &ProposalSource::Uniform, 300, sched, 0.0, seed).unwrap();
            assert_eq!(t.best_subset, vec![2, 3]);
            assert_eq!(t.best_value(), 6.0);
        }
    }

    #[test]
    fn annealing_parameter_errors() {
        let obj = Objective::new(ObjectiveKind::Density, star(5), 2).unwrap();
        assert!(Schedule::new(0.0, 0.5).is_err());
        assert!(Schedule::new(1.0, 1.0).is_err());
        let sched = Schedule { t0: 1.0, alpha: 0.9 };
        assert!(simulated_annealing(&obj, &ProposalSource::Uniform, 10, sched, 1.0, 0).is_err());
        let bad = Schedule { t0: -1.0, alpha: 0.9 };
        assert!(simulated_annealing(&obj, &ProposalSource::Uniform, 10, bad, 0.0, 0).is_err());
    }

    #[test]
    fn zero_jump_pool_starts_from_sample() {
        let obj = Objective::new(ObjectiveKind::Density, star(5), 2).unwrap();
        let pool = SamplePool::new(6, vec![ClickPattern::from_clicked(6, &[2, 4]).unwrap()], "", None).unwrap();
        let src = ProposalSource::pool(pool, 2).unwrap();
        let sched = Schedule::new(1.0, 0.9).unwrap();
        let t = simulated_annealing(&obj, &src, 1, sched, 0.0, 3).unwrap();
        assert_eq!(t.best_subset, vec![2, 4]);
        assert!(!t.pool_wrapped);
    }

    #[test]
    fn greedy_fixtures() {
        let g = complete(6);
        let s = greedy_peel(&g, 3).unwrap();
        assert_eq!(s, vec![3, 4, 5]);
        assert_eq!(density(&g, &s).unwrap(), 6.0);

        let s = greedy_peel(&star(5), 2).unwrap();
        assert_eq!(s, vec![0, 5]);
        assert_eq!(density(&star(5), &s).unwrap(), 2.0);

        let complex = Graph::new(ComplexMatrix::from_fn(3, 3, |i, j| C64::new(0.0, if i != j { 1.0 } else { 0.0 }))).unwrap();
        assert!(greedy_peel(&complex, 2).is_err());
        assert!(greedy_peel(&g, 6).is_err());
    }
}
