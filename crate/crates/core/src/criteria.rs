//! The four global quality criteria and their incremental deltas.
//!
//! Every criterion here is a sum of per-community terms that depend only
//! on a community's [`CommunityStats`]. A node move or a merge touches at
//! most two terms, so deltas are exact differences of those terms rather
//! than a hand-expanded closed form.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, WeightView};
use crate::partition::{CommunityStats, NodeLinks, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlobalKind {
    /// Modularity with a resolution factor on the null term.
    Rb,
    /// Modularity of `A + rI`.
    Afg,
    /// Absolute Potts model rewarding links and penalising missing links.
    Rn,
    /// Markov stability of the walk network at time `t`.
    So,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalCriterion {
    pub kind: GlobalKind,
    /// gamma for `Rb` and `Rn`, r for `Afg`, t for `So`.
    pub param: f64,
}

impl GlobalCriterion {
    pub fn rb(gamma: f64) -> Self {
        GlobalCriterion { kind: GlobalKind::Rb, param: gamma }
    }

    pub fn afg(r: f64) -> Self {
        GlobalCriterion { kind: GlobalKind::Afg, param: r }
    }

    pub fn rn(gamma: f64) -> Self {
        GlobalCriterion { kind: GlobalKind::Rn, param: gamma }
    }

    pub fn so(t: f64) -> Self {
        GlobalCriterion { kind: GlobalKind::So, param: t }
    }

    /// Checks the scale against the criterion's domain on `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let p = self.param;
        if !p.is_finite() {
            return Err(Error::Domain(format!("scale parameter {p} is not finite")));
        }
        match self.kind {
            GlobalKind::Rb | GlobalKind::Rn | GlobalKind::So if p < 0.0 => {
                Err(Error::Domain(format!("{:?} parameter must be >= 0, got {p}", self.kind)))
            }
            // r = 0 adds nothing, so it stays valid even with isolated nodes
            GlobalKind::Afg if g.node_count() > 0 && p != 0.0 && p <= -g.min_strength() => Err(Error::Domain(format!(
                "AFG parameter r = {p} must exceed -min strength = {}",
                -g.min_strength()
            ))),
            _ => Ok(()),
        }
    }
}

/// A criterion bound to the graph it scores.
///
/// `graph` is the topology (neighbourhoods, connectivity); `view` supplies
/// the internal weights and null-term strengths. They coincide except for
/// stability, where internal weights come from the walk network.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    criterion: GlobalCriterion,
    graph: &'a Graph,
    view: WeightView<'a>,
    two_m: f64,
    node_count: f64,
}

impl<'a> Objective<'a> {
    /// Binds RB, AFG or RN to `g`. Stability is accepted only at `t = 1`,
    /// where the walk network is `g` itself; use [`Objective::stability`]
    /// otherwise.
    pub fn new(g: &'a Graph, criterion: GlobalCriterion) -> Result<Self> {
        criterion.validate(g)?;
        if criterion.kind == GlobalKind::So && criterion.param != 1.0 {
            return Err(Error::Contract(
                "stability at t != 1 needs its walk network; use Objective::stability".into(),
            ));
        }
        Ok(Self::bind(g, g, criterion))
    }

    /// Binds stability at time `t` with a precomputed walk network `A_t`.
    pub fn stability(g: &'a Graph, walk: &'a Graph, t: f64) -> Result<Self> {
        let criterion = GlobalCriterion::so(t);
        criterion.validate(g)?;
        if walk.node_count() != g.node_count() {
            return Err(Error::Contract("walk network has a different node count".into()));
        }
        Ok(Self::bind(g, walk, criterion))
    }

    fn bind(g: &'a Graph, weights: &'a Graph, criterion: GlobalCriterion) -> Self {
        Objective {
            criterion,
            graph: g,
            view: WeightView {
                adjacency: weights,
                strengths: g.strengths(),
            },
            two_m: g.total_weight(),
            node_count: g.node_count() as f64,
        }
    }

    #[inline]
    pub fn criterion(&self) -> GlobalCriterion {
        self.criterion
    }

    #[inline]
    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    #[inline]
    pub fn view(&self) -> WeightView<'a> {
        self.view
    }

    /// Contribution of one community to the quality.
    pub fn term(&self, s: &CommunityStats) -> f64 {
        let m2 = self.two_m;
        if m2 <= 0.0 {
            return match self.criterion.kind {
                GlobalKind::Rn => rn_term(s, self.criterion.param),
                _ => 0.0,
            };
        }
        match self.criterion.kind {
            GlobalKind::Rb => (s.w_in - self.criterion.param * s.w_tot * s.w_tot / m2) / m2,
            GlobalKind::So => (s.w_in - s.w_tot * s.w_tot / m2) / m2,
            GlobalKind::Afg => {
                let r = self.criterion.param;
                let shift = r * s.size as f64;
                let m2r = m2 + self.node_count * r;
                let tot = s.w_tot + shift;
                (s.w_in + shift - tot * tot / m2r) / m2r
            }
            GlobalKind::Rn => rn_term(s, self.criterion.param),
        }
    }

    /// Quality from the partition's ledgers, which must be bound to
    /// [`Objective::view`].
    pub fn quality(&self, p: &Partition) -> f64 {
        p.all_stats().map(|s| self.term(s)).sum()
    }

    /// Quality recomputed from node labels alone.
    pub fn quality_from_scratch(&self, p: &Partition) -> f64 {
        let mut fresh = p.clone();
        fresh.rebind(self.view);
        self.quality(&fresh)
    }

    /// Delta of a move given both ledgers and the node's links.
    #[inline]
    pub fn move_gain(&self, source: &CommunityStats, target: &CommunityStats, links: &NodeLinks) -> f64 {
        let src_after = source.without_node(links, links.to_source);
        let tgt_after = target.with_node(links, links.to_target);
        (self.term(&src_after) - self.term(source)) + (self.term(&tgt_after) - self.term(target))
    }

    /// Delta of merging two communities joined by `between`.
    #[inline]
    pub fn merge_gain(&self, a: &CommunityStats, b: &CommunityStats, between: f64) -> f64 {
        self.term(&a.merged(b, between)) - self.term(a) - self.term(b)
    }

    /// `Q(after moving node into target) - Q(now)`; `p` is not modified.
    pub fn delta_move(&self, p: &Partition, node: usize, target: usize) -> Result<f64> {
        if node >= p.node_count() || target >= p.slot_count() {
            return Err(Error::Contract(format!("move of node {node} into slot {target} is out of range")));
        }
        let source = p.community_of(node);
        if source == target {
            return Err(Error::Contract(format!("node {node} is already in community {target}")));
        }
        let links = NodeLinks::compute(self.view, p, node, target);
        Ok(self.move_gain(p.stats(source), p.stats(target), &links))
    }

    /// `Q(after merging c1 and c2) - Q(now)`; `p` is not modified.
    pub fn delta_merge(&self, p: &Partition, c1: usize, c2: usize) -> Result<f64> {
        if c1 == c2 {
            return Err(Error::Contract(format!("cannot merge community {c1} with itself")));
        }
        if !p.is_live(c1) || !p.is_live(c2) {
            return Err(Error::Contract(format!("merge of empty community ({c1}, {c2})")));
        }
        let between = weight_between(self.view, p, c1, c2);
        Ok(self.merge_gain(p.stats(c1), p.stats(c2), between))
    }
}

/// Potts term `1/2 sum_{i != j in c} (A_ij - gamma J_ij)` with `J = 1 - A`.
///
/// This is the negated Hamiltonian, so that higher is better as for the
/// modularity family. Diagonal entries belong to neither sum.
fn rn_term(s: &CommunityStats, gamma: f64) -> f64 {
    let linked = s.w_in - s.loops;
    let n = s.size as f64;
    let missing = n * (n - 1.0) - linked;
    0.5 * (linked - gamma * missing)
}

/// `sum_{i in c1, j in c2} A_ij`, scanning the smaller community.
pub fn weight_between(view: WeightView<'_>, p: &Partition, c1: usize, c2: usize) -> f64 {
    let (scan, other) = if p.members(c1).len() <= p.members(c2).len() {
        (c1, c2)
    } else {
        (c2, c1)
    };
    p.members(scan)
        .iter()
        .flat_map(|&u| view.adjacency.neighbors(u))
        .filter(|&(v, _)| p.community_of(v) == other)
        .map(|(_, w)| w)
        .sum()
}

fn scratch_quality(g: &Graph, p: &Partition, criterion: GlobalCriterion) -> Result<f64> {
    let obj = Objective::new(g, criterion)?;
    Ok(obj.quality_from_scratch(p))
}

/// Newman-Girvan modularity.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    scratch_quality(g, p, GlobalCriterion::rb(1.0)).expect("gamma = 1 is always valid")
}

pub fn q_rb(g: &Graph, p: &Partition, gamma: f64) -> Result<f64> {
    scratch_quality(g, p, GlobalCriterion::rb(gamma))
}

pub fn q_afg(g: &Graph, p: &Partition, r: f64) -> Result<f64> {
    scratch_quality(g, p, GlobalCriterion::afg(r))
}

pub fn q_rn(g: &Graph, p: &Partition, gamma: f64) -> Result<f64> {
    scratch_quality(g, p, GlobalCriterion::rn(gamma))
}

/// Ledgers of every community, recomputed from labels. Test helper for
/// callers that want to compare against a partition's live ledgers.
pub fn fresh_stats(view: WeightView<'_>, p: &Partition) -> Vec<CommunityStats> {
    let mut fresh = p.clone();
    fresh.rebind(view);
    fresh.community_ids().map(|c| *fresh.stats(c)).collect()
}
