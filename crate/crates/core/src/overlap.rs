//! Local multi-scale detection: seed growth, regrowth across scales and
//! merging of strongly overlapping communities.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cover::{encompasses, intersection_size, union_sorted, Cover};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::local::{similarity_graph, LocalCriterion, LocalKind, LocalLedger, NodeContribution};

/// Overlap ratio used when none is given.
pub const DEFAULT_ETA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOptions {
    /// Overlap ratio at or above which two communities merge.
    pub eta: f64,
    /// Compare internal edge weight instead of node counts when merging.
    pub weighted: bool,
    /// Closed neighbourhoods for the similarity graph.
    pub closed: bool,
    /// Let a node belong to several communities.
    pub overlap: bool,
    /// Cap on cleanup passes per growth; `None` runs until nothing is removed.
    pub k_max: Option<usize>,
}

impl Default for LocalOptions {
    fn default() -> Self {
        LocalOptions {
            eta: DEFAULT_ETA,
            weighted: false,
            closed: false,
            overlap: true,
            k_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalRecord {
    pub param: f64,
    pub cover: Cover,
    /// Mean criterion value over the communities.
    pub quality: f64,
}

/// Result of one growth.
#[derive(Debug, Clone, PartialEq)]
pub struct Growth {
    pub members: Vec<usize>,
    pub changed: bool,
    pub added: usize,
    pub removed: usize,
    pub cleanup_passes: usize,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap on key; ties go to the smaller node id
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then_with(|| other.node.cmp(&self.node))
    }
}

/// Reusable state for growing communities on one graph.
#[derive(Debug)]
pub struct Grower<'g> {
    g: &'g Graph,
    inside: Vec<bool>,
    inward: Vec<f64>,
    key: Vec<f64>,
    queued: Vec<bool>,
    touched: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

impl<'g> Grower<'g> {
    pub fn new(g: &'g Graph) -> Self {
        let n = g.node_count();
        Grower {
            g,
            inside: vec![false; n],
            inward: vec![0.0; n],
            key: vec![0.0; n],
            queued: vec![false; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn contribution(&self, node: usize) -> NodeContribution {
        NodeContribution {
            inward: self.inward[node],
            self_weight: self.g.self_weight(node),
            strength: self.g.strength(node),
        }
    }

    fn link(&mut self, node: usize, sign: f64) {
        for (u, w) in self.g.neighbors(node) {
            if u == node {
                continue;
            }
            if self.inward[u] == 0.0 && !self.queued[u] {
                self.touched.push(u);
            }
            self.inward[u] += sign * w;
        }
    }

    fn offer(&mut self, crit: &LocalCriterion, node: usize, blocked: Option<&[bool]>) {
        if self.inside[node] || blocked.is_some_and(|b| b[node]) {
            return;
        }
        let key = crit.priority(&self.contribution(node));
        if !self.queued[node] {
            self.touched.push(node);
        }
        self.queued[node] = true;
        self.key[node] = key;
        self.heap.push(Entry { key, node });
    }

    fn reset(&mut self, members: &[usize]) {
        for &v in &self.touched {
            self.inward[v] = 0.0;
            self.queued[v] = false;
        }
        for &v in members {
            self.inward[v] = 0.0;
            self.queued[v] = false;
            self.inside[v] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    /// Grows `community` by the frontier heuristic, then prunes members
    /// whose removal raises the criterion value. `blocked` nodes are never
    /// added.
    pub fn grow(
        &mut self,
        community: &[usize],
        crit: &LocalCriterion,
        k_max: Option<usize>,
        blocked: Option<&[bool]>,
    ) -> Result<Growth> {
        if community.is_empty() {
            return Err(Error::Contract("cannot grow an empty community".into()));
        }
        let n = self.g.node_count();
        let mut members: Vec<usize> = community.to_vec();
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= n {
                return Err(Error::NodeOutOfRange { node: last, node_count: n });
            }
        }
        for &v in &members {
            self.inside[v] = true;
        }
        for &v in &members {
            self.link(v, 1.0);
        }
        let mut ledger = LocalLedger::default();
        for &v in &members {
            let s = self.g.strength(v);
            let own = self.g.self_weight(v);
            ledger.inner += self.inward[v] + own;
            ledger.outer += s - self.inward[v] - own;
        }
        let frontier: Vec<usize> = self.touched.clone();
        for v in frontier {
            self.offer(crit, v, blocked);
        }

        let mut added = 0;
        while let Some(Entry { key, node }) = self.heap.pop() {
            if self.inside[node] || !self.queued[node] || key.to_bits() != self.key[node].to_bits() {
                continue;
            }
            self.queued[node] = false;
            let c = self.contribution(node);
            if crit.join_gain(&ledger, &c) > 0.0 {
                ledger = ledger.with_node(&c);
                self.inside[node] = true;
                members.push(node);
                added += 1;
                self.link(node, 1.0);
                for (u, _) in self.g.neighbors(node) {
                    self.offer(crit, u, blocked);
                }
            }
        }

        let mut removed = 0;
        let mut passes = 0;
        if added > 0 {
            members.sort_unstable();
            let cap = k_max.unwrap_or(usize::MAX);
            while passes < cap {
                passes += 1;
                let mut pass_removed = 0;
                let mut i = 0;
                while i < members.len() {
                    let v = members[i];
                    if members.len() - pass_removed > 1 {
                        let c = self.contribution(v);
                        let without = ledger.without_node(&c);
                        if crit.value(&without) > crit.value(&ledger) {
                            ledger = without;
                            self.inside[v] = false;
                            self.link(v, -1.0);
                            pass_removed += 1;
                        }
                    }
                    i += 1;
                }
                if pass_removed == 0 {
                    break;
                }
                removed += pass_removed;
                let (inside, touched) = (&self.inside, &mut self.touched);
                members.retain(|&v| {
                    if !inside[v] {
                        touched.push(v);
                    }
                    inside[v]
                });
            }
        }
        members.sort_unstable();
        self.reset(&members);
        let mut original = community.to_vec();
        original.sort_unstable();
        original.dedup();
        let changed = members != original;
        Ok(Growth {
            members,
            changed,
            added,
            removed,
            cleanup_passes: passes,
        })
    }
}

/// One-shot growth of `community` on `g`.
pub fn grow_community(
    g: &Graph,
    community: &[usize],
    crit: &LocalCriterion,
    k_max: Option<usize>,
) -> Result<Vec<usize>> {
    Ok(Grower::new(g).grow(community, crit, k_max, None)?.members)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Argument(format!("overlap ratio must be in (0, 1], got {eta}")));
    }
    Ok(())
}

struct Merger<'a> {
    g: &'a Graph,
    weighted: bool,
    mark: Vec<bool>,
}

impl Merger<'_> {
    fn internal_weight(&mut self, members: &[usize]) -> f64 {
        LocalLedger::of_marked(self.g, members, &mut self.mark).inner / 2.0
    }

    fn intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    fn should_merge(&mut self, c1: &[usize], c2: &[usize], eta: f64) -> bool {
        if self.weighted {
            let (w1, w2) = (self.internal_weight(c1), self.internal_weight(c2));
            if w1 > 0.0 && w2 > 0.0 {
                let shared = Self::intersection(c1, c2);
                let wi = self.internal_weight(&shared);
                return wi / w2 >= eta || wi / w1 >= eta;
            }
        }
        let shared = intersection_size(c1, c2) as f64;
        shared / c2.len() as f64 >= eta || shared / c1.len() as f64 >= eta
    }
}

/// Worklist merge of `comms` starting from the ids in `initial`.
fn merge_worklist(
    g: &Graph,
    comms: Vec<Vec<usize>>,
    initial: impl IntoIterator<Item = usize>,
    eta: f64,
    weighted: bool,
) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut slots: Vec<Option<Vec<usize>>> = comms.into_iter().map(Some).collect();
    let mut index: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, c) in slots.iter().enumerate() {
        for &v in c.as_ref().into_iter().flatten() {
            index[v].push(k);
        }
    }
    let mut queued = vec![false; slots.len()];
    let mut queue = VecDeque::new();
    for k in initial {
        if !queued[k] {
            queued[k] = true;
            queue.push_back(k);
        }
    }
    let mut merger = Merger {
        g,
        weighted,
        mark: vec![false; n],
    };
    let mut seen = vec![usize::MAX; slots.len()];
    let mut turn = 0usize;
    while let Some(c1) = queue.pop_front() {
        turn += 1;
        queued[c1] = false;
        let Some(members) = slots[c1].as_ref() else {
            continue;
        };
        let mut candidates = Vec::new();
        for &v in members {
            for &k in &index[v] {
                if k != c1 && seen[k] != turn {
                    seen[k] = turn;
                    candidates.push(k);
                }
            }
        }
        candidates.sort_unstable();
        let mut merged = false;
        for c2 in candidates {
            let Some(other) = slots[c2].as_ref() else {
                continue;
            };
            let current = slots[c1].as_ref().expect("c1 stays alive while scanning");
            if !merger.should_merge(current, other, eta) {
                continue;
            }
            let other = slots[c2].take().expect("checked above");
            for &v in &other {
                index[v].retain(|&k| k != c2);
                if !index[v].contains(&c1) {
                    index[v].push(c1);
                }
            }
            let union = union_sorted(slots[c1].as_ref().expect("alive"), &other);
            slots[c1] = Some(union);
            merged = true;
        }
        if merged && !queued[c1] {
            queued[c1] = true;
            queue.push_back(c1);
        }
    }
    slots.into_iter().flatten().collect()
}

/// Merges communities overlapping by at least `eta` of either side until
/// no such pair remains.
pub fn merge_overlapping(cover: &Cover, eta: f64, weighted: bool, g: &Graph) -> Result<Cover> {
    check_eta(eta)?;
    if cover.node_count() != g.node_count() {
        return Err(Error::Contract(format!(
            "cover over {} nodes for a graph of {}",
            cover.node_count(),
            g.node_count()
        )));
    }
    let comms = cover.communities().to_vec();
    let all = 0..comms.len();
    Cover::new(g.node_count(), merge_worklist(g, comms, all, eta, weighted))
}

/// Checks that local scales run from fine to coarse (non-increasing alpha).
pub fn check_local_order(params: &[f64]) -> Result<()> {
    if params.is_empty() {
        return Err(Error::Argument("scale list is empty".into()));
    }
    for pair in params.windows(2) {
        if pair[0] < pair[1] {
            return Err(Error::Argument(format!(
                "local scales must be non-increasing (got {} then {})",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

fn mean_quality(g: &Graph, comms: &[Vec<usize>], crit: &LocalCriterion) -> f64 {
    if comms.is_empty() {
        return 0.0;
    }
    let mut mark = vec![false; g.node_count()];
    let sum: f64 = comms.iter().map(|c| crit.value(&LocalLedger::of_marked(g, c, &mut mark))).sum();
    sum / comms.len() as f64
}

/// Multi-scale local detection. Each scale regrows the previous cover at
/// the new alpha; the first scale seeds from every node in ascending order.
/// Deterministic: no randomness is involved.
pub fn detect_local(g: &Graph, kind: LocalKind, params: &[f64], opts: &LocalOptions) -> Result<Vec<LocalRecord>> {
    check_local_order(params)?;
    check_eta(opts.eta)?;
    let criteria = params
        .iter()
        .map(|&a| LocalCriterion::new(kind, a))
        .collect::<Result<Vec<_>>>()?;
    let sim;
    let work: &Graph = match kind {
        LocalKind::Lfk => g,
        LocalKind::Hlslw => {
            sim = similarity_graph(g, opts.closed)?;
            sim.graph()
        }
    };
    let n = g.node_count();
    let mut grower = Grower::new(work);
    let mut comms: Vec<Vec<usize>> = Vec::new();
    let mut owner: Vec<bool> = vec![false; n];
    let mut records = Vec::with_capacity(params.len());

    for (step, crit) in criteria.iter().enumerate() {
        let to_check: Vec<usize>;
        if step == 0 {
            let mut covered = vec![false; n];
            for seed in 0..n {
                if covered[seed] {
                    continue;
                }
                let blocked = (!opts.overlap).then_some(owner.as_slice());
                let grown = grower.grow(&[seed], crit, opts.k_max, blocked)?;
                covered[seed] = true;
                for &v in &grown.members {
                    covered[v] = true;
                    owner[v] = true;
                }
                comms.push(grown.members);
            }
            to_check = (0..comms.len()).collect();
        } else {
            let mut index: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (k, c) in comms.iter().enumerate() {
                for &v in c {
                    index[v].push(k);
                }
            }
            let mut alive = vec![true; comms.len()];
            let mut changed = Vec::new();
            let mut stamp = vec![usize::MAX; comms.len()];
            for k in 0..comms.len() {
                if !alive[k] {
                    continue;
                }
                let grown = if opts.overlap {
                    grower.grow(&comms[k], crit, opts.k_max, None)?
                } else {
                    for &v in &comms[k] {
                        owner[v] = false;
                    }
                    let grown = grower.grow(&comms[k], crit, opts.k_max, Some(&owner))?;
                    for &v in &grown.members {
                        owner[v] = true;
                    }
                    grown
                };
                if !grown.changed {
                    continue;
                }
                if !opts.overlap {
                    // nodes pruned from this community are free again
                    for &v in &comms[k] {
                        if grown.members.binary_search(&v).is_err() {
                            owner[v] = false;
                        }
                    }
                }
                comms[k] = grown.members;
                changed.push(k);
                for &v in &comms[k] {
                    for &j in &index[v] {
                        if j > k && alive[j] && stamp[j] != k {
                            stamp[j] = k;
                            if encompasses(&comms[k], &comms[j]) {
                                alive[j] = false;
                            }
                        }
                    }
                }
            }
            let mut remap = vec![usize::MAX; comms.len()];
            let mut kept = Vec::with_capacity(comms.len());
            for (k, c) in core::mem::take(&mut comms).into_iter().enumerate() {
                if alive[k] {
                    remap[k] = kept.len();
                    kept.push(c);
                }
            }
            comms = kept;
            if !opts.overlap {
                owner.iter_mut().for_each(|o| *o = false);
                for c in &comms {
                    for &v in c {
                        owner[v] = true;
                    }
                }
            }
            to_check = changed.into_iter().map(|k| remap[k]).filter(|&k| k != usize::MAX).collect();
        }
        comms = merge_worklist(g, core::mem::take(&mut comms), to_check, opts.eta, opts.weighted);
        let quality = mean_quality(work, &comms, crit);
        records.push(LocalRecord {
            param: crit.alpha,
            cover: Cover::new(n, comms.clone())?,
            quality,
        });
    }
    Ok(records)
}
