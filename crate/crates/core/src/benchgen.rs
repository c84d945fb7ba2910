//! Planted two-level benchmark: micro communities nested in macro
//! communities with controllable mixing.
//!
//! A planted-partition analogue of the usual hierarchical benchmark, with
//! uniform block sizes and degrees instead of power laws. Each node splits
//! its degree into stubs wired inside its micro block (`1 - mu2`), inside
//! its macro block but outside its micro block (`mu2 - mu1`), and outside
//! its macro block (`mu1`); stubs of each kind are paired at random.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSpec {
    pub n: usize,
    pub micro_min: usize,
    pub micro_max: usize,
    pub macro_min: usize,
    pub macro_max: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    /// Fraction of a node's edges leaving its macro community.
    pub mu1: f64,
    /// Fraction of a node's edges leaving its micro community.
    pub mu2: f64,
    pub seed: u64,
}

impl BenchSpec {
    /// Small benchmark: 1000 nodes, micro 20-40, macro 100-250, mean degree 10.
    pub fn small(mu1: f64, mu2: f64, seed: u64) -> Self {
        BenchSpec {
            n: 1000,
            micro_min: 20,
            micro_max: 40,
            macro_min: 100,
            macro_max: 250,
            mean_degree: 10.0,
            max_degree: 50,
            mu1,
            mu2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::Infeasible(msg));
        if !(0.0 <= self.mu1 && self.mu1 <= self.mu2 && self.mu2 < 1.0) {
            return bad(format!("need 0 <= mu1 <= mu2 < 1, got mu1 = {}, mu2 = {}", self.mu1, self.mu2));
        }
        if self.micro_min == 0 || self.micro_min > self.micro_max {
            return bad(format!("micro size range [{}, {}] is empty", self.micro_min, self.micro_max));
        }
        if self.macro_min > self.macro_max {
            return bad(format!("macro size range [{}, {}] is empty", self.macro_min, self.macro_max));
        }
        if self.micro_max > self.macro_min {
            return bad(format!(
                "micro communities (up to {}) must fit in the smallest macro community ({})",
                self.micro_max, self.macro_min
            ));
        }
        if self.n < self.macro_min {
            return bad(format!("{} nodes cannot hold a macro community of {}", self.n, self.macro_min));
        }
        if self.mean_degree.is_nan() || self.mean_degree < 1.0 || self.mean_degree > self.max_degree as f64 {
            return bad(format!(
                "mean degree {} must be in [1, max degree {}]",
                self.mean_degree, self.max_degree
            ));
        }
        Ok(())
    }
}

/// Generated graph with its two ground truths as per-node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub graph: Graph,
    pub edges: Vec<(usize, usize)>,
    pub micro: Vec<usize>,
    pub macro_: Vec<usize>,
}

/// Splits `total` into block sizes within `[lo, hi]`.
fn block_sizes(rng: &mut ChaCha8Rng, total: usize, lo: usize, hi: usize) -> Result<Vec<usize>> {
    let k_min = total.div_ceil(hi);
    let k_max = total / lo;
    if k_min > k_max {
        return Err(Error::Infeasible(format!(
            "{total} nodes cannot be split into blocks of {lo} to {hi}"
        )));
    }
    let mean = (lo + hi) as f64 / 2.0;
    let k = (math::round(total as f64 / mean) as usize).clamp(k_min, k_max);
    let mut sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(lo..=hi)).collect();
    let mut sum: usize = sizes.iter().sum();
    while sum != total {
        let i = rng.gen_range(0..k);
        if sum < total && sizes[i] < hi {
            sizes[i] += 1;
            sum += 1;
        } else if sum > total && sizes[i] > lo {
            sizes[i] -= 1;
            sum -= 1;
        }
    }
    Ok(sizes)
}

/// Rounds `x` up or down at random so the expectation is `x`.
fn stochastic_round(rng: &mut ChaCha8Rng, x: f64) -> usize {
    let base = math::floor(x);
    let extra = if rng.gen::<f64>() < x - base { 1 } else { 0 };
    base as usize + extra
}

/// Pairs stubs into distinct edges allowed by `allowed`. A pair that
/// would repeat an edge or close a loop is repaired by swapping endpoints
/// with a random accepted edge; stubs still unpaired after `sweeps`
/// reshuffles are counted and dropped.
fn pair_stubs(
    rng: &mut ChaCha8Rng,
    mut stubs: Vec<usize>,
    allowed: impl Fn(usize, usize) -> bool,
    sweeps: usize,
) -> (Vec<(usize, usize)>, usize) {
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    let ok = |u: usize, v: usize, present: &BTreeSet<(usize, usize)>| u != v && allowed(u, v) && !present.contains(&key(u, v));
    let mut present = BTreeSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    for _ in 0..sweeps {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut rest = Vec::new();
        for pair in stubs.chunks(2) {
            let &[u, v] = pair else {
                rest.push(pair[0]);
                continue;
            };
            if ok(u, v, &present) {
                present.insert(key(u, v));
                edges.push(key(u, v));
                continue;
            }
            let mut placed = false;
            for _ in 0..10 {
                if edges.is_empty() {
                    break;
                }
                let e = rng.gen_range(0..edges.len());
                let (x, y) = edges[e];
                let (x, y) = if rng.gen::<bool>() { (x, y) } else { (y, x) };
                present.remove(&edges[e]);
                if ok(u, x, &present) && ok(v, y, &present) && key(u, x) != key(v, y) {
                    present.insert(key(u, x));
                    present.insert(key(v, y));
                    edges[e] = key(u, x);
                    edges.push(key(v, y));
                    placed = true;
                    break;
                }
                present.insert(edges[e]);
            }
            if !placed {
                rest.push(u);
                rest.push(v);
            }
        }
        stubs = rest;
    }
    (edges, stubs.len())
}

const SWEEPS: usize = 100;

/// Generates a benchmark; identical specs give identical graphs.
pub fn generate_two_level(spec: &BenchSpec) -> Result<Benchmark> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;

    let macro_sizes = block_sizes(&mut rng, n, spec.macro_min, spec.macro_max)?;
    let mut macro_ = vec![0usize; n];
    let mut micro = vec![0usize; n];
    let mut micro_blocks: Vec<Vec<usize>> = Vec::new();
    // ids are shuffled so blocks are not contiguous id ranges
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let mut node = 0;
    for (m, &size) in macro_sizes.iter().enumerate() {
        for s in block_sizes(&mut rng, size, spec.micro_min, spec.micro_max)? {
            let block: Vec<usize> = ids[node..node + s].to_vec();
            for &v in &block {
                macro_[v] = m;
                micro[v] = micro_blocks.len();
            }
            micro_blocks.push(block);
            node += s;
        }
    }

    let lo = math::ceil(spec.mean_degree / 2.0).max(1.0) as usize;
    let hi = (math::floor(1.5 * spec.mean_degree) as usize).min(spec.max_degree).max(lo);
    let mut inner_stubs: Vec<Vec<usize>> = vec![Vec::new(); micro_blocks.len()];
    let mut middle_stubs: Vec<Vec<usize>> = vec![Vec::new(); macro_sizes.len()];
    let mut outer_stubs: Vec<usize> = Vec::new();
    for v in 0..n {
        let d = rng.gen_range(lo..=hi);
        let outer = stochastic_round(&mut rng, d as f64 * spec.mu1);
        let middle = stochastic_round(&mut rng, d as f64 * (spec.mu2 - spec.mu1)).min(d - outer);
        let inner = d - outer - middle;
        let block = micro_blocks[micro[v]].len();
        if inner >= block {
            return Err(Error::Infeasible(format!(
                "node {v} needs {inner} links inside a micro community of {block} nodes"
            )));
        }
        let macro_room = macro_sizes[macro_[v]] - block;
        if middle > macro_room {
            return Err(Error::Infeasible(format!(
                "node {v} needs {middle} links to {macro_room} other nodes of its macro community"
            )));
        }
        if outer > n - macro_sizes[macro_[v]] {
            return Err(Error::Infeasible(format!("node {v} needs {outer} links outside its macro community")));
        }
        inner_stubs[micro[v]].extend(core::iter::repeat_n(v, inner));
        middle_stubs[macro_[v]].extend(core::iter::repeat_n(v, middle));
        outer_stubs.extend(core::iter::repeat_n(v, outer));
    }

    let total_stubs: usize = inner_stubs.iter().chain(&middle_stubs).map(Vec::len).sum::<usize>() + outer_stubs.len();
    let mut edges = Vec::with_capacity(total_stubs / 2);
    let mut unmatched = 0;
    let mut take = |(pool, left): (Vec<(usize, usize)>, usize)| {
        edges.extend(pool);
        unmatched += left;
    };
    for stubs in inner_stubs {
        take(pair_stubs(&mut rng, stubs, |_, _| true, SWEEPS));
    }
    for stubs in middle_stubs {
        take(pair_stubs(&mut rng, stubs, |u, v| micro[u] != micro[v], SWEEPS));
    }
    take(pair_stubs(&mut rng, outer_stubs, |u, v| macro_[u] != macro_[v], SWEEPS));
    if unmatched * 100 > total_stubs {
        return Err(Error::Infeasible(format!(
            "{unmatched} of {total_stubs} edge stubs could not be paired without duplicates"
        )));
    }
    edges.sort_unstable();
    let graph = Graph::from_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))?;
    Ok(Benchmark {
        graph,
        edges,
        micro,
        macro_,
    })
}
