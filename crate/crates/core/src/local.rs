//! Local criteria: LFK fitness and HLSLW structural-similarity tightness.
//!
//! Both work on a [`LocalLedger`] over some weighted graph: the plain
//! graph for fitness, the [`SimilarityGraph`] for tightness. `inner` is the
//! ordered-pair internal weight (each internal edge counted twice, so
//! `inner + outer` is the community's total strength).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalKind {
    /// Fitness `k_in / (k_in + k_out)^alpha`.
    Lfk,
    /// Tightness over structural similarities.
    Hlslw,
}

/// `k_in`/`k_out` (or `S_in`/`S_out` over similarity weights).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LocalLedger {
    pub inner: f64,
    pub outer: f64,
}

impl LocalLedger {
    /// From-scratch ledger of a node set.
    pub fn of(g: &Graph, members: &[usize]) -> Self {
        let mut mark = vec![false; g.node_count()];
        Self::of_marked(g, members, &mut mark)
    }

    /// As [`LocalLedger::of`] with a caller-provided all-false scratch
    /// bitmap, left all-false on return.
    pub fn of_marked(g: &Graph, members: &[usize], mark: &mut [bool]) -> Self {
        for &m in members {
            mark[m] = true;
        }
        let mut inner = 0.0;
        let mut total = 0.0;
        for &m in members {
            total += g.strength(m);
            inner += g.neighbors(m).filter(|&(v, _)| mark[v]).map(|(_, w)| w).sum::<f64>();
        }
        for &m in members {
            mark[m] = false;
        }
        LocalLedger {
            inner,
            outer: total - inner,
        }
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.inner + self.outer
    }

    /// Ledger after a node with `node` links joins.
    #[inline]
    pub fn with_node(&self, node: &NodeContribution) -> Self {
        LocalLedger {
            inner: self.inner + 2.0 * node.inward + node.self_weight,
            outer: self.outer - node.inward + node.outward(),
        }
    }

    /// Ledger after a member with `node` links (towards the other members) leaves.
    #[inline]
    pub fn without_node(&self, node: &NodeContribution) -> Self {
        LocalLedger {
            inner: self.inner - 2.0 * node.inward - node.self_weight,
            outer: self.outer + node.inward - node.outward(),
        }
    }
}

/// A node's links relative to a community it is not (counted as) part of.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeContribution {
    /// Weight into the community, self excluded.
    pub inward: f64,
    pub self_weight: f64,
    pub strength: f64,
}

impl NodeContribution {
    /// Weight leaving towards non-members.
    #[inline]
    pub fn outward(&self) -> f64 {
        self.strength - self.inward - self.self_weight
    }

    /// Contribution of `node` towards the set flagged in `inside`.
    pub fn of(g: &Graph, inside: &[bool], node: usize) -> Self {
        let mut c = NodeContribution {
            strength: g.strength(node),
            ..Default::default()
        };
        for (v, w) in g.neighbors(node) {
            if v == node {
                c.self_weight = w;
            } else if inside[v] {
                c.inward += w;
            }
        }
        c
    }
}

/// Fitness `k_in / (k_in + k_out)^alpha`, zero for an edgeless community.
pub fn lfk_fitness(ledger: &LocalLedger, alpha: f64) -> f64 {
    let total = ledger.total();
    if total <= 0.0 {
        return 0.0;
    }
    ledger.inner / math::powf(total, alpha)
}

/// `f_{c+i} - f_{c-i}` for a sorted community `c`.
///
/// `i` may be a member (retention check) or a neighbour of `c` (join check).
pub fn lfk_node_gain(g: &Graph, community: &[usize], node: usize, alpha: f64) -> Result<f64> {
    if community.is_empty() {
        return Err(Error::Contract("empty community".into()));
    }
    let mut inside = vec![false; g.node_count()];
    for &m in community {
        inside[m] = true;
    }
    let member = inside[node];
    inside[node] = false;
    let contribution = NodeContribution::of(g, &inside, node);
    if !member && contribution.inward <= 0.0 && !g.row_targets(node).iter().any(|&v| inside[v]) {
        return Err(Error::Contract(format!("node {node} is neither in nor adjacent to the community")));
    }
    let base: Vec<usize> = community.iter().copied().filter(|&v| v != node).collect();
    let without = LocalLedger::of(g, &base);
    let with = without.with_node(&contribution);
    Ok(lfk_fitness(&with, alpha) - lfk_fitness(&without, alpha))
}

/// Tightness `S_in / (S_in + S_out)`.
pub fn tightness(ledger: &LocalLedger) -> Result<f64> {
    let total = ledger.total();
    if total <= 0.0 {
        return Err(Error::Domain("tightness of a community without similarity weight".into()));
    }
    Ok(ledger.inner / total)
}

/// Tightness gain of a candidate node.
///
/// Evaluates `S_out/S_in - (alpha * s_out - s_in) / (2 s_in)` with the
/// community's similarity ledger in the first fraction and the node's own
/// similarity into (`s_in`) and out of (`s_out`) the community in the
/// second. At `alpha = 1` the gain is positive exactly when joining raises
/// the tightness; larger `alpha` penalises the node's outside links more.
pub fn tightness_gain(ledger: &LocalLedger, node: &NodeContribution, alpha: f64) -> Result<f64> {
    if ledger.inner <= 0.0 {
        return Err(Error::Domain("tightness gain needs S_in > 0".into()));
    }
    if node.inward <= 0.0 {
        return Err(Error::Domain("tightness gain needs a node similar to the community".into()));
    }
    Ok(ledger.outer / ledger.inner - (alpha * node.outward() - node.inward) / (2.0 * node.inward))
}

/// A local criterion at a given scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCriterion {
    pub kind: LocalKind,
    pub alpha: f64,
}

impl LocalCriterion {
    pub fn new(kind: LocalKind, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Domain(format!("local scale alpha must be finite and > 0, got {alpha}")));
        }
        Ok(LocalCriterion { kind, alpha })
    }

    /// Community value averaged into the per-scale quality.
    pub fn value(&self, ledger: &LocalLedger) -> f64 {
        match self.kind {
            LocalKind::Lfk => lfk_fitness(ledger, self.alpha),
            LocalKind::Hlslw => tightness(ledger).unwrap_or(0.0),
        }
    }

    /// Gain of adding `node` to a community with ledger `ledger`; a node
    /// joins when this is strictly positive.
    pub fn join_gain(&self, ledger: &LocalLedger, node: &NodeContribution) -> f64 {
        match self.kind {
            LocalKind::Lfk => lfk_fitness(&ledger.with_node(node), self.alpha) - lfk_fitness(ledger, self.alpha),
            LocalKind::Hlslw => {
                if node.inward <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                if ledger.inner <= 0.0 {
                    // a seed has no internal similarity yet; any similar node raises it
                    let before = tightness(ledger).unwrap_or(0.0);
                    return tightness(&ledger.with_node(node)).unwrap_or(0.0) - before;
                }
                tightness_gain(ledger, node, self.alpha).unwrap_or(f64::NEG_INFINITY)
            }
        }
    }

    /// Frontier rank: `2 d_in / (d_in + d_out)^alpha` for fitness, the
    /// similarity into the community for tightness.
    pub fn priority(&self, node: &NodeContribution) -> f64 {
        match self.kind {
            LocalKind::Lfk => {
                let total = node.strength;
                if total <= 0.0 {
                    0.0
                } else {
                    2.0 * node.inward / math::powf(total, self.alpha)
                }
            }
            LocalKind::Hlslw => node.inward,
        }
    }
}

/// Graph whose edge weights are the structural similarities of the input's
/// adjacent pairs. Zero similarities are kept so adjacency is preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    graph: Graph,
    closed: bool,
}

impl SimilarityGraph {
    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Whether neighbourhoods include the node itself.
    #[inline]
    pub fn closed(&self) -> bool {
        self.closed
    }
}

impl core::ops::Deref for SimilarityGraph {
    type Target = Graph;
    fn deref(&self) -> &Graph {
        &self.graph
    }
}

fn check_non_negative(g: &Graph) -> Result<()> {
    for i in 0..g.node_count() {
        if let Some(&w) = g.row_weights(i).iter().find(|&&w| w.is_nan() || w < 0.0) {
            return Err(Error::Domain(format!("similarity needs non-negative weights, node {i} has {w}")));
        }
    }
    Ok(())
}

/// Neighbourhood weights of `i` without its diagonal; with `closed` the
/// node itself is added with weight 1.
fn neighbourhood(g: &Graph, i: usize, closed: bool) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = g.neighbors(i).filter(|&(v, _)| v != i).collect();
    if closed {
        let at = out.partition_point(|&(v, _)| v < i);
        out.insert(at, (i, 1.0));
    }
    out
}

fn cosine(a: &[(usize, f64)], b: &[(usize, f64)], norm_a: f64, norm_b: f64) -> f64 {
    let denom = norm_a * norm_b;
    if denom <= 0.0 {
        return 0.0;
    }
    let (mut x, mut y, mut dot) = (0, 0, 0.0);
    while x < a.len() && y < b.len() {
        match a[x].0.cmp(&b[y].0) {
            core::cmp::Ordering::Less => x += 1,
            core::cmp::Ordering::Greater => y += 1,
            core::cmp::Ordering::Equal => {
                dot += a[x].1 * b[y].1;
                x += 1;
                y += 1;
            }
        }
    }
    dot / denom
}

fn norm(list: &[(usize, f64)]) -> f64 {
    math::sqrt(list.iter().map(|&(_, w)| w * w).sum())
}

/// Structural similarity of any two nodes.
pub fn structural_similarity(g: &Graph, i: usize, j: usize, closed: bool) -> Result<f64> {
    check_non_negative(g)?;
    let a = neighbourhood(g, i, closed);
    let b = neighbourhood(g, j, closed);
    Ok(cosine(&a, &b, norm(&a), norm(&b)))
}

/// Similarity for every adjacent pair of `g`, computed once.
pub fn similarity_graph(g: &Graph, closed: bool) -> Result<SimilarityGraph> {
    check_non_negative(g)?;
    let n = g.node_count();
    let hoods: Vec<Vec<(usize, f64)>> = (0..n).map(|i| neighbourhood(g, i, closed)).collect();
    let norms: Vec<f64> = hoods.iter().map(|h| norm(h)).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for &j in g.row_targets(i) {
            if j <= i {
                continue;
            }
            let s = cosine(&hoods[i], &hoods[j], norms[i], norms[j]);
            rows[i].push((j, s));
            rows[j].push((i, s));
        }
    }
    Ok(SimilarityGraph {
        graph: Graph::from_matrix_rows(rows),
        closed,
    })
}
