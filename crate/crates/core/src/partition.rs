//! Crisp partitions with live per-community weight ledgers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightView;

/// Ledger kept for every community.
///
/// `w_in` is the ordered-pair internal weight `sum_{i,j in c} A_ij`
/// (diagonal included), `w_tot` the summed strengths, `loops` the summed
/// diagonal entries `sum_{i in c} A_ii`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CommunityStats {
    pub w_in: f64,
    pub w_tot: f64,
    pub size: usize,
    pub loops: f64,
}

impl CommunityStats {
    /// Ledger of the union of two disjoint communities joined by
    /// `between = sum_{i in a, j in b} A_ij`.
    pub fn merged(&self, other: &Self, between: f64) -> Self {
        CommunityStats {
            w_in: self.w_in + other.w_in + 2.0 * between,
            w_tot: self.w_tot + other.w_tot,
            size: self.size + other.size,
            loops: self.loops + other.loops,
        }
    }

    /// Ledger after adding a node with the given links into this community.
    pub fn with_node(&self, links: &NodeLinks, into_this: f64) -> Self {
        CommunityStats {
            w_in: self.w_in + 2.0 * into_this + links.self_weight,
            w_tot: self.w_tot + links.strength,
            size: self.size + 1,
            loops: self.loops + links.self_weight,
        }
    }

    /// Ledger after removing a member whose weight to the remaining members
    /// is `into_rest`.
    pub fn without_node(&self, links: &NodeLinks, into_rest: f64) -> Self {
        CommunityStats {
            w_in: self.w_in - 2.0 * into_rest - links.self_weight,
            w_tot: self.w_tot - links.strength,
            size: self.size - 1,
            loops: self.loops - links.self_weight,
        }
    }
}

/// What a single node move needs to know about the moving node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLinks {
    /// Weight from the node to the other members of its current community.
    pub to_source: f64,
    /// Weight from the node to the target community.
    pub to_target: f64,
    pub self_weight: f64,
    pub strength: f64,
}

impl NodeLinks {
    /// Scans the node's row once.
    pub fn compute(view: WeightView<'_>, p: &Partition, node: usize, target: usize) -> Self {
        let source = p.assignment[node];
        let mut to_source = 0.0;
        let mut to_target = 0.0;
        let mut self_weight = 0.0;
        for (v, w) in view.adjacency.neighbors(node) {
            if v == node {
                self_weight = w;
            } else if p.assignment[v] == source {
                to_source += w;
            } else if p.assignment[v] == target {
                to_target += w;
            }
        }
        NodeLinks {
            to_source,
            to_target,
            self_weight,
            strength: view.strengths[node],
        }
    }
}

/// Node -> community map. Community ids are slot indices that stay stable
/// while the partition is edited; emptied slots are skipped by iteration.
#[derive(Debug, Clone)]
pub struct Partition {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
    position: Vec<usize>,
    stats: Vec<CommunityStats>,
    live: usize,
}

impl Partition {
    /// One community per node.
    pub fn singletons(view: WeightView<'_>) -> Self {
        let n = view.adjacency.node_count();
        let labels: Vec<usize> = (0..n).collect();
        Self::from_labels(view, &labels).expect("singleton labels are always valid")
    }

    /// Builds a partition from arbitrary per-node labels.
    pub fn from_labels(view: WeightView<'_>, labels: &[usize]) -> Result<Self> {
        let n = view.adjacency.node_count();
        if labels.len() != n {
            return Err(Error::Argument(format!(
                "{} labels for a graph with {n} nodes",
                labels.len()
            )));
        }
        let mut remap: alloc::collections::BTreeMap<usize, usize> = Default::default();
        let mut assignment = Vec::with_capacity(n);
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut position = Vec::with_capacity(n);
        for (node, &label) in labels.iter().enumerate() {
            let next = members.len();
            let c = *remap.entry(label).or_insert(next);
            if c == members.len() {
                members.push(Vec::new());
            }
            position.push(members[c].len());
            members[c].push(node);
            assignment.push(c);
        }
        let live = members.len();
        let mut p = Partition {
            assignment,
            stats: vec![CommunityStats::default(); members.len()],
            members,
            position,
            live,
        };
        p.rebind(view);
        Ok(p)
    }

    /// Builds a partition from explicit member lists covering every node once.
    pub fn from_communities(view: WeightView<'_>, communities: &[Vec<usize>]) -> Result<Self> {
        let n = view.adjacency.node_count();
        let mut labels = vec![usize::MAX; n];
        for (c, list) in communities.iter().enumerate() {
            for &v in list {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, node_count: n });
                }
                if labels[v] != usize::MAX {
                    return Err(Error::Argument(format!("node {v} appears in two communities")));
                }
                labels[v] = c;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Argument(format!("node {v} is in no community")));
        }
        Self::from_labels(view, &labels)
    }

    /// Recomputes every ledger against a (possibly different) weight view.
    pub fn rebind(&mut self, view: WeightView<'_>) {
        for s in self.stats.iter_mut() {
            *s = CommunityStats::default();
        }
        for node in 0..self.assignment.len() {
            let c = self.assignment[node];
            let s = &mut self.stats[c];
            s.size += 1;
            s.w_tot += view.strengths[node];
            for (v, w) in view.adjacency.neighbors(node) {
                if self.assignment[v] == c {
                    s.w_in += w;
                    if v == node {
                        s.loops += w;
                    }
                }
            }
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    /// Number of non-empty communities.
    #[inline]
    pub fn community_count(&self) -> usize {
        self.live
    }

    /// Upper bound (exclusive) on community ids.
    #[inline]
    pub fn slot_count(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    #[inline]
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn is_live(&self, c: usize) -> bool {
        c < self.members.len() && !self.members[c].is_empty()
    }

    pub fn community_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.members.len()).filter(|&c| !self.members[c].is_empty())
    }

    /// Members of community `c`, in no particular order.
    #[inline]
    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    #[inline]
    pub fn stats(&self, c: usize) -> &CommunityStats {
        &self.stats[c]
    }

    pub fn all_stats(&self) -> impl Iterator<Item = &CommunityStats> + '_ {
        self.community_ids().map(|c| &self.stats[c])
    }

    /// Sorted member lists, ordered by smallest member.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .community_ids()
            .map(|c| {
                let mut m = self.members[c].clone();
                m.sort_unstable();
                m
            })
            .collect();
        out.sort_unstable_by_key(|m| m[0]);
        out
    }

    /// Dense labels `0..k`, numbered by smallest member. Two partitions
    /// describe the same grouping iff their canonical labels are equal.
    pub fn canonical_labels(&self) -> Vec<usize> {
        let mut relabel = vec![usize::MAX; self.members.len()];
        let mut next = 0;
        self.assignment
            .iter()
            .map(|&c| {
                if relabel[c] == usize::MAX {
                    relabel[c] = next;
                    next += 1;
                }
                relabel[c]
            })
            .collect()
    }

    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.canonical_labels() == other.canonical_labels()
    }

    /// Moves `node` into `target`, updating both ledgers from `links`.
    pub fn move_node(&mut self, node: usize, target: usize, links: &NodeLinks) -> Result<()> {
        let source = self.assignment[node];
        if source == target {
            return Err(Error::Contract(format!("node {node} is already in community {target}")));
        }
        if target >= self.members.len() {
            return Err(Error::Contract(format!("no community slot {target}")));
        }
        self.stats[source] = self.stats[source].without_node(links, links.to_source);
        self.stats[target] = self.stats[target].with_node(links, links.to_target);
        self.detach(node);
        if self.members[target].is_empty() {
            self.live += 1;
        }
        self.position[node] = self.members[target].len();
        self.members[target].push(node);
        self.assignment[node] = target;
        if self.members[source].is_empty() {
            self.stats[source] = CommunityStats::default();
            self.live -= 1;
        }
        Ok(())
    }

    fn detach(&mut self, node: usize) {
        let c = self.assignment[node];
        let pos = self.position[node];
        let list = &mut self.members[c];
        list.swap_remove(pos);
        if pos < list.len() {
            let moved = list[pos];
            self.position[moved] = pos;
        }
    }

    /// Merges two communities joined by `between` weight. The larger slot
    /// survives; its id is returned.
    pub fn merge(&mut self, c1: usize, c2: usize, between: f64) -> Result<usize> {
        if c1 == c2 {
            return Err(Error::Contract(format!("cannot merge community {c1} with itself")));
        }
        if !self.is_live(c1) || !self.is_live(c2) {
            return Err(Error::Contract(format!("merge of empty community ({c1}, {c2})")));
        }
        let (keep, gone) = if self.members[c1].len() >= self.members[c2].len() {
            (c1, c2)
        } else {
            (c2, c1)
        };
        self.stats[keep] = self.stats[keep].merged(&self.stats[gone], between);
        self.stats[gone] = CommunityStats::default();
        let moving = core::mem::take(&mut self.members[gone]);
        for node in moving {
            self.position[node] = self.members[keep].len();
            self.members[keep].push(node);
            self.assignment[node] = keep;
        }
        self.live -= 1;
        Ok(keep)
    }

    /// Checks structural consistency and that ledgers match a from-scratch
    /// recomputation within `tol`.
    pub fn audit(&self, view: WeightView<'_>, tol: f64) -> Result<()> {
        let mut fresh = self.clone();
        fresh.rebind(view);
        let mut live = 0;
        for c in 0..self.members.len() {
            for (k, &v) in self.members[c].iter().enumerate() {
                if self.assignment[v] != c || self.position[v] != k {
                    return Err(Error::Contract(format!("membership index broken at node {v}")));
                }
            }
            if !self.members[c].is_empty() {
                live += 1;
            }
            let (a, b) = (&self.stats[c], &fresh.stats[c]);
            let close = |x: f64, y: f64| (x - y).abs() <= tol * (1.0 + y.abs());
            if a.size != self.members[c].len()
                || !close(a.w_in, b.w_in)
                || !close(a.w_tot, b.w_tot)
                || !close(a.loops, b.loops)
            {
                return Err(Error::Contract(format!("ledger drift in community {c}")));
            }
        }
        if live != self.live {
            return Err(Error::Contract("live community count drifted".into()));
        }
        Ok(())
    }
}
