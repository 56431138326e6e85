//! Seeded problem-instance generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numerics::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    RandomComplex,
    PlantedClique,
    ZeroOne,
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceKind::RandomComplex => "random-complex",
            InstanceKind::PlantedClique => "planted-clique",
            InstanceKind::ZeroOne => "zero-one",
        })
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-complex" => Ok(InstanceKind::RandomComplex),
            "planted-clique" => Ok(InstanceKind::PlantedClique),
            "zero-one" => Ok(InstanceKind::ZeroOne),
            other => Err(Error::InvalidArgument(format!("unknown instance kind {other:?}"))),
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("{name} = {p} must lie in [0, 1]")));
    }
    Ok(())
}

/// Zero diagonal; each off-diagonal weight has real and imaginary parts
/// uniform on `[-1, 1]`.
pub fn random_complex(n: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            adj[(i, j)] = w;
            adj[(j, i)] = w;
        }
    }
    Graph::new(adj)
}

/// Erdős–Rényi 0/1 graph.
pub fn zero_one(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    check_probability("edge probability", edge_prob)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < edge_prob {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// A 0/1 graph with a known clique.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub graph: Graph,
    /// Sorted clique vertices.
    pub clique: Vec<usize>,
}

/// Clique on a uniformly chosen vertex set of size `clique_size`; every
/// other pair is an edge with probability `noise_prob`.
pub fn planted_clique(n: usize, clique_size: usize, noise_prob: f64, seed: u64) -> Result<PlantedInstance> {
    if clique_size > n {
        return Err(Error::InvalidArgument(format!("clique size {clique_size} exceeds n = {n}")));
    }
    check_probability("noise probability", noise_prob)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clique = sample_indices(&mut rng, n, clique_size).into_vec();
    clique.sort_unstable();
    let mut in_clique = vec![false; n];
    for &v in &clique {
        in_clique[v] = true;
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let noise = rng.random::<f64>() < noise_prob;
            if (in_clique[i] && in_clique[j]) || noise {
                edges.push((i, j));
            }
        }
    }
    Ok(PlantedInstance { graph: Graph::from_edges(n, &edges)?, clique })
}

/// Exhaustive maximum of `f` over all `k`-subsets of `0..n`, in
/// lexicographic order; the first maximizer wins ties.
pub fn exhaustive_best<F>(n: usize, k: usize, mut f: F) -> Result<(Vec<usize>, f64)>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let mut subset: Vec<usize> = (0..k).collect();
    let mut best = (subset.clone(), f(&subset)?);
    loop {
        // advance to the next combination
        let mut i = k;
        while i > 0 && subset[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(best);
        }
        subset[i - 1] += 1;
        for j in i..k {
            subset[j] = subset[j - 1] + 1;
        }
        let v = f(&subset)?;
        if v > best.1 {
            best = (subset.clone(), v);
        }
    }
}
