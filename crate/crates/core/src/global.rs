//! Two-phase greedy optimiser for global criteria, warm-started across
//! scales.
//!
//! Phase one moves single nodes to the neighbouring community with the
//! best strictly positive gain, refusing moves that would disconnect the
//! source community. Phase two merges whole communities with their best
//! neighbour. Both phases repeat until neither changes anything.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::criteria::{GlobalCriterion, GlobalKind, Objective};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{NodeLinks, Partition};
use crate::walk::WalkCache;

/// Tuning knobs for [`optimize_at_scale`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalOptions {
    /// Cap on phase passes; reaching it means gains were inconsistent.
    pub pass_cap: usize,
    /// Gains at or below this are treated as zero (float noise).
    pub min_gain: f64,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        GlobalOptions {
            pass_cap: 1000,
            min_gain: 1e-12,
        }
    }
}

/// Result of optimising one scale.
#[derive(Debug, Clone)]
pub struct ScaleOutcome {
    pub partition: Partition,
    pub quality: f64,
    pub node_moves: usize,
    pub merges: usize,
    /// Node-move plus merge passes.
    pub passes: usize,
}

/// One record of a multi-scale run.
#[derive(Debug, Clone)]
pub struct GlobalRecord {
    pub param: f64,
    pub partition: Partition,
    pub quality: f64,
    pub node_moves: usize,
    pub merges: usize,
}

/// Reusable scratch space for the optimiser.
struct Workspace {
    link: Vec<f64>,
    linked: Vec<bool>,
    touched: Vec<usize>,
    candidate: Vec<bool>,
    candidates: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            link: vec![0.0; n],
            linked: vec![false; n],
            touched: Vec::new(),
            candidate: vec![false; n],
            candidates: Vec::new(),
            stamp: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn add_link(&mut self, c: usize, w: f64) {
        if !self.linked[c] {
            self.linked[c] = true;
            self.touched.push(c);
        }
        self.link[c] += w;
    }

    fn mark_candidate(&mut self, c: usize) {
        if !self.candidate[c] {
            self.candidate[c] = true;
            self.candidates.push(c);
        }
    }

    fn reset(&mut self) {
        for &c in &self.touched {
            self.link[c] = 0.0;
            self.linked[c] = false;
        }
        self.touched.clear();
        for &c in &self.candidates {
            self.candidate[c] = false;
        }
        self.candidates.clear();
    }
}

/// Whether the members of `community` other than `excluded` stay connected
/// in `g`, by breadth-first search restricted to the community.
fn stays_connected(g: &Graph, p: &Partition, community: usize, excluded: usize, ws: &mut Workspace) -> bool {
    let members = p.members(community);
    let Some(&start) = members.iter().find(|&&v| v != excluded) else {
        return true;
    };
    ws.epoch = ws.epoch.wrapping_add(1);
    if ws.epoch == 0 {
        ws.stamp.iter_mut().for_each(|s| *s = 0);
        ws.epoch = 1;
    }
    let epoch = ws.epoch;
    ws.stamp[excluded] = epoch;
    ws.stamp[start] = epoch;
    ws.queue.clear();
    ws.queue.push_back(start);
    let mut reached = 1;
    while let Some(u) = ws.queue.pop_front() {
        for &v in g.row_targets(u) {
            if ws.stamp[v] != epoch && p.community_of(v) == community {
                ws.stamp[v] = epoch;
                reached += 1;
                ws.queue.push_back(v);
            }
        }
    }
    reached == members.len() - 1
}

fn node_phase(
    obj: &Objective<'_>,
    p: &mut Partition,
    order: &mut [usize],
    rng: &mut ChaCha8Rng,
    ws: &mut Workspace,
    opts: &GlobalOptions,
    q: &mut f64,
) -> Result<(usize, usize)> {
    let g = obj.graph();
    let weights = obj.view().adjacency;
    let strengths = obj.view().strengths;
    let mut total_moves = 0;
    let mut passes = 0;
    loop {
        passes += 1;
        if passes > opts.pass_cap {
            return Err(Error::PassCapExceeded { cap: opts.pass_cap });
        }
        order.shuffle(rng);
        let mut moves = 0;
        for &node in order.iter() {
            let source = p.community_of(node);
            let mut self_weight = 0.0;
            for (v, w) in weights.neighbors(node) {
                if v == node {
                    self_weight = w;
                } else {
                    ws.add_link(p.community_of(v), w);
                }
            }
            for &v in g.row_targets(node) {
                let c = p.community_of(v);
                if c != source {
                    ws.mark_candidate(c);
                }
            }
            let to_source = ws.link[source];
            let mut best_gain = opts.min_gain;
            let mut best = None;
            for &c in &ws.candidates {
                let links = NodeLinks {
                    to_source,
                    to_target: ws.link[c],
                    self_weight,
                    strength: strengths[node],
                };
                let gain = obj.move_gain(p.stats(source), p.stats(c), &links);
                if gain > best_gain {
                    best_gain = gain;
                    best = Some((c, links));
                }
            }
            ws.reset();
            let Some((target, links)) = best else {
                continue;
            };
            if p.stats(source).size > 2 && !stays_connected(g, p, source, node, ws) {
                continue;
            }
            p.move_node(node, target, &links)?;
            *q += best_gain;
            moves += 1;
        }
        total_moves += moves;
        if moves == 0 {
            return Ok((total_moves, passes));
        }
    }
}

fn merge_phase(
    obj: &Objective<'_>,
    p: &mut Partition,
    rng: &mut ChaCha8Rng,
    ws: &mut Workspace,
    opts: &GlobalOptions,
    q: &mut f64,
) -> Result<(usize, usize)> {
    let g = obj.graph();
    let weights = obj.view().adjacency;
    let mut total_merges = 0;
    let mut passes = 0;
    let mut ids: Vec<usize> = Vec::new();
    loop {
        passes += 1;
        if passes > opts.pass_cap {
            return Err(Error::PassCapExceeded { cap: opts.pass_cap });
        }
        ids.clear();
        ids.extend(p.community_ids());
        ids.shuffle(rng);
        let mut merges = 0;
        for &c in &ids {
            if !p.is_live(c) {
                continue;
            }
            for &u in p.members(c) {
                for (v, w) in weights.neighbors(u) {
                    let cv = p.community_of(v);
                    if cv != c {
                        ws.add_link(cv, w);
                    }
                }
                for &v in g.row_targets(u) {
                    let cv = p.community_of(v);
                    if cv != c {
                        ws.mark_candidate(cv);
                    }
                }
            }
            let mut best_gain = opts.min_gain;
            let mut best = None;
            for &nc in &ws.candidates {
                let gain = obj.merge_gain(p.stats(c), p.stats(nc), ws.link[nc]);
                if gain > best_gain {
                    best_gain = gain;
                    best = Some((nc, ws.link[nc]));
                }
            }
            ws.reset();
            if let Some((nc, between)) = best {
                p.merge(c, nc, between)?;
                *q += best_gain;
                merges += 1;
            }
        }
        total_merges += merges;
        if merges == 0 {
            return Ok((total_merges, passes));
        }
    }
}

/// Optimises `obj` starting from `initial`, whose communities must each be
/// connected in the objective's graph.
///
/// Only communities adjacent in the objective's graph are considered as
/// move or merge targets, so every community stays connected.
pub fn optimize_at_scale(
    obj: &Objective<'_>,
    initial: Partition,
    rng: &mut ChaCha8Rng,
    opts: &GlobalOptions,
) -> Result<ScaleOutcome> {
    let n = obj.graph().node_count();
    if initial.node_count() != n {
        return Err(Error::Contract(format!(
            "initial partition covers {} nodes, graph has {n}",
            initial.node_count()
        )));
    }
    let mut p = initial;
    p.rebind(obj.view());
    let mut q = obj.quality(&p);
    let mut ws = Workspace::new(n.max(p.slot_count()));
    let mut order: Vec<usize> = (0..n).collect();
    let (mut node_moves, mut merges, mut passes) = (0, 0, 0);
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > opts.pass_cap {
            return Err(Error::PassCapExceeded { cap: opts.pass_cap });
        }
        let (moved, np) = node_phase(obj, &mut p, &mut order, rng, &mut ws, opts, &mut q)?;
        let (merged, mp) = merge_phase(obj, &mut p, rng, &mut ws, opts, &mut q)?;
        node_moves += moved;
        merges += merged;
        passes += np + mp;
        // the node phase ended on a pass without moves, so an idle merge
        // phase leaves nothing to do
        if merged == 0 {
            break;
        }
    }
    Ok(ScaleOutcome {
        quality: obj.quality(&p),
        partition: p,
        node_moves,
        merges,
        passes,
    })
}

/// Checks that `params` run from fine to coarse for `kind`: decreasing for
/// resolution-style parameters, increasing for Markov time.
pub fn check_scale_order(kind: GlobalKind, params: &[f64]) -> Result<()> {
    if params.is_empty() {
        return Err(Error::Argument("scale list is empty".into()));
    }
    let ascending = kind == GlobalKind::So;
    for pair in params.windows(2) {
        let ok = if ascending { pair[0] <= pair[1] } else { pair[0] >= pair[1] };
        if !ok {
            return Err(Error::Argument(format!(
                "scales for {kind:?} must be {} (got {} then {})",
                if ascending { "non-decreasing" } else { "non-increasing" },
                pair[0],
                pair[1]
            )));
        }
    }
    Ok(())
}

/// Multi-scale detection: starts from singletons at the first scale and
/// warm-starts each later scale from the previous result.
pub fn detect_global(
    g: &Graph,
    kind: GlobalKind,
    params: &[f64],
    tau: f64,
    seed: u64,
    opts: &GlobalOptions,
) -> Result<Vec<GlobalRecord>> {
    check_scale_order(kind, params)?;
    for &param in params {
        GlobalCriterion { kind, param }.validate(g)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = if kind == GlobalKind::So {
        Some(WalkCache::new(g, tau)?)
    } else {
        None
    };
    let mut current = Partition::singletons(g.view());
    let mut records = Vec::with_capacity(params.len());
    for &param in params {
        let criterion = GlobalCriterion { kind, param };
        let outcome = match cache.as_mut() {
            Some(cache) => {
                let walk = cache.walk_for_time(param)?;
                let obj = Objective::stability(g, &walk, param)?;
                optimize_at_scale(&obj, current, &mut rng, opts)?
            }
            None => {
                let obj = Objective::new(g, criterion)?;
                optimize_at_scale(&obj, current, &mut rng, opts)?
            }
        };
        current = outcome.partition.clone();
        records.push(GlobalRecord {
            param,
            partition: outcome.partition,
            quality: outcome.quality,
            node_moves: outcome.node_moves,
            merges: outcome.merges,
        });
    }
    Ok(records)
}
