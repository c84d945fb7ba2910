//! Random-walk networks `A_t = D M^t` for stability optimisation.
//!
//! Powers are composed on adjacency rows rather than dense matrices, with
//! an optional threshold `tau` dropping weak entries of every composed
//! network. Fractional times interpolate linearly between the two
//! neighbouring integer powers.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::criteria::Objective;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::math;
use crate::partition::Partition;

/// Threshold used for composed walk networks unless overridden.
pub const DEFAULT_TAU: f64 = 0.001;

/// Number of composed integer powers kept besides `A_0` and `A_1`.
const KEPT_POWERS: usize = 2;

/// Walk network of length `t1 + t2` from the networks of lengths `t1` and
/// `t2`. Entries below `tau` are dropped, diagonal included.
pub fn compose_walk(first: &Graph, second: &Graph, strengths: &[f64], tau: f64) -> Result<Graph> {
    let n = strengths.len();
    if first.node_count() != n || second.node_count() != n {
        return Err(Error::Contract(format!(
            "walk networks over {} and {} nodes with {n} strengths",
            first.node_count(),
            second.node_count()
        )));
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::Domain(format!("walk threshold must be >= 0, got {tau}")));
    }
    let mut acc = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut rows = Vec::with_capacity(n);
    for node in 0..n {
        let d = strengths[node];
        if d > 0.0 {
            for (mid, w1) in first.neighbors(node) {
                let d_mid = strengths[mid];
                if d_mid <= 0.0 {
                    continue;
                }
                let v1 = w1 / d;
                for (end, w2) in second.neighbors(mid) {
                    let v2 = w2 / d_mid;
                    if acc[end] == 0.0 {
                        touched.push(end);
                    }
                    acc[end] += d * v1 * v2;
                }
            }
        }
        let mut row = Vec::with_capacity(touched.len());
        for &end in &touched {
            let w = acc[end];
            if w >= tau && w > 0.0 {
                row.push((end, w));
            }
            acc[end] = 0.0;
        }
        touched.clear();
        rows.push(row);
    }
    Ok(Graph::from_matrix_rows(rows))
}

/// The zero-length walk: self-loops carrying each node's strength.
pub fn zero_walk(g: &Graph) -> Graph {
    let rows = (0..g.node_count())
        .map(|i| {
            let d = g.strength(i);
            if d > 0.0 {
                vec![(i, d)]
            } else {
                Vec::new()
            }
        })
        .collect();
    Graph::from_matrix_rows(rows)
}

/// Entrywise `a_weight * A + b_weight * B`.
pub fn blend(a: &Graph, a_weight: f64, b: &Graph, b_weight: f64) -> Graph {
    let rows = (0..a.node_count())
        .map(|i| {
            let (ta, wa) = (a.row_targets(i), a.row_weights(i));
            let (tb, wb) = (b.row_targets(i), b.row_weights(i));
            let mut row = Vec::with_capacity(ta.len().max(tb.len()));
            let (mut x, mut y) = (0, 0);
            while x < ta.len() || y < tb.len() {
                let ja = ta.get(x).copied().unwrap_or(usize::MAX);
                let jb = tb.get(y).copied().unwrap_or(usize::MAX);
                let j = ja.min(jb);
                let mut w = 0.0;
                if ja == j {
                    w += a_weight * wa[x];
                    x += 1;
                }
                if jb == j {
                    w += b_weight * wb[y];
                    y += 1;
                }
                row.push((j, w));
            }
            row.retain(|&(_, w)| w > 0.0);
            row
        })
        .collect();
    Graph::from_matrix_rows(rows)
}

/// Memoised walk networks for one base graph.
///
/// `A_0` and `A_1` are always available; composed powers are kept for the
/// two most recently used exponents.
#[derive(Debug)]
pub struct WalkCache<'g> {
    graph: &'g Graph,
    tau: f64,
    zero: Graph,
    powers: BTreeMap<u32, Graph>,
    recent: VecDeque<u32>,
    compositions: usize,
}

impl<'g> WalkCache<'g> {
    pub fn new(graph: &'g Graph, tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::Domain(format!("walk threshold must be finite and >= 0, got {tau}")));
        }
        Ok(WalkCache {
            graph,
            tau,
            zero: zero_walk(graph),
            powers: BTreeMap::new(),
            recent: VecDeque::new(),
            compositions: 0,
        })
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Number of compositions performed so far.
    #[inline]
    pub fn compositions(&self) -> usize {
        self.compositions
    }

    /// Exponents currently cached beyond 0 and 1.
    pub fn cached_powers(&self) -> Vec<u32> {
        self.powers.keys().copied().collect()
    }

    fn get(&self, t: u32) -> &Graph {
        match t {
            0 => &self.zero,
            1 => self.graph,
            _ => &self.powers[&t],
        }
    }

    fn touch(&mut self, t: u32) {
        if t < 2 {
            return;
        }
        self.recent.retain(|&x| x != t);
        self.recent.push_back(t);
        while self.recent.len() > KEPT_POWERS {
            if let Some(old) = self.recent.pop_front() {
                self.powers.remove(&old);
            }
        }
    }

    /// Largest available exponent not above `limit` (at least 1).
    fn largest_cached(&self, limit: u32) -> u32 {
        self.powers.range(..=limit).next_back().map(|(&k, _)| k).unwrap_or(1)
    }

    fn ensure_power(&mut self, t: u32) -> Result<()> {
        if t < 2 || self.powers.contains_key(&t) {
            self.touch(t);
            return Ok(());
        }
        // greedy decomposition into cached pieces, largest first
        let first = self.largest_cached(t - 1);
        let mut acc: Option<Graph> = None;
        let mut remaining = t - first;
        while remaining > 0 {
            let piece = self.largest_cached(remaining);
            let left = acc.as_ref().unwrap_or_else(|| self.get(first));
            let next = compose_walk(left, self.get(piece), self.graph.strengths(), self.tau)?;
            self.compositions += 1;
            acc = Some(next);
            remaining -= piece;
        }
        let walk = acc.expect("t >= 2 needs at least one composition");
        self.powers.insert(t, walk);
        self.touch(t);
        Ok(())
    }

    /// Integer walk network `A_t`.
    pub fn power(&mut self, t: u32) -> Result<&Graph> {
        self.ensure_power(t)?;
        Ok(self.get(t))
    }

    /// Walk network for any `t >= 0`, interpolating between integer powers.
    pub fn walk_for_time(&mut self, t: f64) -> Result<Graph> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("Markov time must be finite and >= 0, got {t}")));
        }
        let lo = math::floor(t);
        let hi = math::ceil(t);
        if lo == hi {
            return Ok(self.power(lo as u32)?.clone());
        }
        let (lo_t, hi_t) = (lo as u32, hi as u32);
        self.ensure_power(lo_t)?;
        self.ensure_power(hi_t)?;
        Ok(blend(self.get(lo_t), hi - t, self.get(hi_t), t - lo))
    }
}

/// Stability of `p` at time `t`: modularity form over `A_t` with the
/// original strengths and total weight.
pub fn stability_q(g: &Graph, p: &Partition, t: f64, cache: &mut WalkCache<'_>) -> Result<f64> {
    if !core::ptr::eq(cache.graph(), g) && cache.graph() != g {
        return Err(Error::Contract("walk cache belongs to a different graph".into()));
    }
    let walk = cache.walk_for_time(t)?;
    let obj = Objective::stability(g, &walk, t)?;
    Ok(obj.quality_from_scratch(p))
}
