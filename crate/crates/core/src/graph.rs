//! Weighted undirected graphs in compressed sparse row form.
//!
//! Every node keeps a row of `(neighbour, weight)` pairs sorted by
//! neighbour id. A self-loop is stored as the diagonal matrix entry
//! `A_ii`; an input loop of edge weight `w` becomes `A_ii = 2w`, so that
//! the strength `d_i` is always the plain row sum and
//! `total_weight() == sum_i d_i == 2m`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    strengths: Vec<f64>,
    total_weight: f64,
}

impl Graph {
    /// Builds a graph from undirected edges `(u, v, w)` over nodes `0..node_count`.
    ///
    /// Each unordered pair may appear once; `(u, v)` and `(v, u)` count as
    /// the same edge.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); node_count];
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            if u == v {
                rows[u].push((u, 2.0 * w));
            } else {
                rows[u].push((v, w));
                rows[v].push((u, w));
            }
        }
        for (u, row) in rows.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(v, _)| v);
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                let v = pair[0].0;
                return Err(Error::DuplicateEdge { u: u.min(v), v: u.max(v) });
            }
        }
        Ok(Self::from_sorted_rows(rows))
    }

    /// Builds a graph from symmetric matrix rows, keeping entries with
    /// weight `>= 0`. Rows need not be sorted. Used for derived networks
    /// (walk powers, similarity weights) where zero weights may be kept.
    pub(crate) fn from_matrix_rows(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|&(v, _)| v);
        }
        Self::from_sorted_rows(rows)
    }

    fn from_sorted_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nnz = rows.iter().map(Vec::len).sum();
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut targets = Vec::with_capacity(nnz);
        let mut weights = Vec::with_capacity(nnz);
        let mut strengths = Vec::with_capacity(rows.len());
        offsets.push(0);
        for row in rows {
            let mut d = 0.0;
            for (v, w) in row {
                targets.push(v);
                weights.push(w);
                d += w;
            }
            strengths.push(d);
            offsets.push(targets.len());
        }
        let total_weight = strengths.iter().sum();
        Graph {
            offsets,
            targets,
            weights,
            strengths,
            total_weight,
        }
    }

    /// A graph with no edges at all.
    pub fn empty(node_count: usize) -> Self {
        Self::from_sorted_rows(vec![Vec::new(); node_count])
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.strengths.len()
    }

    /// Number of stored matrix entries (each off-diagonal edge twice).
    #[inline]
    pub fn entry_count(&self) -> usize {
        self.targets.len()
    }

    /// Number of undirected edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.node_count())
            .filter(|&i| self.row_targets(i).binary_search(&i).is_ok())
            .count();
        (self.entry_count() - loops) / 2 + loops
    }

    #[inline]
    pub fn row_targets(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn row_weights(&self, node: usize) -> &[f64] {
        &self.weights[self.offsets[node]..self.offsets[node + 1]]
    }

    /// `(neighbour, A_ij)` pairs of `node`, including its diagonal entry if any.
    #[inline]
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row_targets(node)
            .iter()
            .copied()
            .zip(self.row_weights(node).iter().copied())
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Matrix entry `A_ij`, zero when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self.row_targets(i).binary_search(&j) {
            Ok(k) => self.row_weights(i)[k],
            Err(_) => 0.0,
        }
    }

    /// Diagonal entry `A_ii`.
    #[inline]
    pub fn self_weight(&self, node: usize) -> f64 {
        self.weight(node, node)
    }

    #[inline]
    pub fn strength(&self, node: usize) -> f64 {
        self.strengths[node]
    }

    #[inline]
    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// `2m`, the sum of all strengths.
    #[inline]
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn min_strength(&self) -> f64 {
        self.strengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The graph seen as its own weight source.
    #[inline]
    pub fn view(&self) -> WeightView<'_> {
        WeightView {
            adjacency: self,
            strengths: &self.strengths,
        }
    }

    /// Connected components as a node -> component label vector.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut next = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.row_targets(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Adjacency used for internal weights paired with the strengths used in
/// null terms. For plain criteria both come from one graph; stability
/// pairs a walk network with the original strengths.
#[derive(Debug, Clone, Copy)]
pub struct WeightView<'a> {
    pub adjacency: &'a Graph,
    pub strengths: &'a [f64],
}

/// Whether `members`, minus `excluded`, induces a connected subgraph.
///
/// An empty set after exclusion counts as connected.
pub fn community_connected(g: &Graph, members: &[usize], excluded: Option<usize>) -> Result<bool> {
    if members.is_empty() {
        return Err(Error::Contract("community_connected needs a non-empty member set".into()));
    }
    if let Some(x) = excluded {
        if !members.contains(&x) {
            return Err(Error::Contract(format!("excluded node {x} is not a member")));
        }
    }
    let n = g.node_count();
    let mut inside = vec![false; n];
    let mut wanted = 0usize;
    for &m in members {
        if m >= n {
            return Err(Error::NodeOutOfRange { node: m, node_count: n });
        }
        if Some(m) != excluded && !inside[m] {
            inside[m] = true;
            wanted += 1;
        }
    }
    let Some(start) = members.iter().copied().find(|&m| Some(m) != excluded) else {
        return Ok(true);
    };
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.row_targets(u) {
            if inside[v] && !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    Ok(reached == wanted)
}

/// `(w_in, w_tot)` of a node set: ordered-pair internal weight
/// `sum_{i,j in S} A_ij` and total strength `sum_{i in S} d_i`.
pub fn community_weights(g: &Graph, members: &[usize]) -> (f64, f64) {
    let mut inside = vec![false; g.node_count()];
    for &m in members {
        inside[m] = true;
    }
    let mut w_in = 0.0;
    let mut w_tot = 0.0;
    for &m in members {
        w_tot += g.strength(m);
        w_in += g.neighbors(m).filter(|&(v, _)| inside[v]).map(|(_, w)| w).sum::<f64>();
    }
    (w_in, w_tot)
}
