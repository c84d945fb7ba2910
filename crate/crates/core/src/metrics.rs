//! Normalised mutual information between community sets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cover::{intersection_size, Cover};
use crate::error::{Error, Result};
use crate::math;

fn entropy_of_counts(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts.map(|c| math::plogp(c as f64 / n)).sum()
}

/// Crisp NMI `2 I / (H1 + H2)` between two labelings of the same nodes.
/// Labelings identical up to renaming, including two single-community
/// labelings, compare as exactly 1.
pub fn nmi_crisp(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!("labelings cover {} and {} nodes", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::Argument("labelings are empty".into()));
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut left: BTreeMap<usize, usize> = BTreeMap::new();
    let mut right: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *left.entry(x).or_default() += 1;
        *right.entry(y).or_default() += 1;
    }
    if joint.len() == left.len() && joint.len() == right.len() {
        // labels correspond one to one: identical up to renaming
        return Ok(1.0);
    }
    let h1 = entropy_of_counts(left.values().copied(), n);
    let h2 = entropy_of_counts(right.values().copied(), n);
    if h1 + h2 <= 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (&(x, y), &c) in &joint {
        let p = c as f64 / n;
        let px = left[&x] as f64 / n;
        let py = right[&y] as f64 / n;
        mi += p * math::ln(p / (px * py));
    }
    Ok((2.0 * mi / (h1 + h2)).clamp(0.0, 1.0))
}

/// Entropy of a binary membership variable with `size` of `n` nodes in.
fn binary_entropy(size: usize, n: usize) -> f64 {
    let p = size as f64 / n as f64;
    math::plogp(p) + math::plogp(1.0 - p)
}

/// Mean normalised `H(X_k | Y)` over the communities of `x`.
fn conditional(x: &Cover, y: &Cover) -> f64 {
    let n = x.node_count();
    let nf = n as f64;
    let hy: Vec<f64> = y.communities().iter().map(|c| binary_entropy(c.len(), n)).collect();
    let mut mark = vec![false; x.len().max(y.len())];
    let mut touched = Vec::new();
    let large: Vec<usize> = (0..y.len())
        .filter(|&l| y.communities()[l].len() as f64 >= nf / core::f64::consts::E)
        .collect();
    let mut total = 0.0;
    for xk in x.communities() {
        let hx = binary_entropy(xk.len(), n);
        if hx <= 0.0 {
            continue;
        }
        for &v in xk {
            for &l in y.memberships(v) {
                if !mark[l] {
                    mark[l] = true;
                    touched.push(l);
                }
            }
        }
        // A disjoint pair can only pass the guard when one side holds at
        // least n/e nodes: below that h(a) + h(b) > a + b >= h(1 - a - b).
        let small = (xk.len() as f64) < nf / core::f64::consts::E;
        let mut best = hx;
        let mut consider = |l: usize, shared: usize| {
            let yl = &y.communities()[l];
            let p11 = shared as f64 / nf;
            let p10 = (xk.len() - shared) as f64 / nf;
            let p01 = (yl.len() - shared) as f64 / nf;
            let p00 = (1.0 - p11 - p10 - p01).max(0.0);
            let (h11, h10, h01, h00) = (math::plogp(p11), math::plogp(p10), math::plogp(p01), math::plogp(p00));
            if h11 + h00 >= h01 + h10 {
                best = best.min(h11 + h10 + h01 + h00 - hy[l]);
            }
        };
        if small {
            for &l in &touched {
                consider(l, intersection_size(xk, &y.communities()[l]));
            }
            for &l in &large {
                if !mark[l] {
                    consider(l, 0);
                }
            }
        } else {
            for (l, &marked) in mark.iter().enumerate().take(y.len()) {
                let shared = if marked { intersection_size(xk, &y.communities()[l]) } else { 0 };
                consider(l, shared);
            }
        }
        for l in touched.drain(..) {
            mark[l] = false;
        }
        total += best / hx;
    }
    if x.is_empty() {
        0.0
    } else {
        total / x.len() as f64
    }
}

/// Overlapping NMI `1 - (H(X|Y)_norm + H(Y|X)_norm) / 2` over binary
/// membership variables. Each community's conditional entropy is the best
/// over the other cover's communities that carry enough information about
/// it (`h(P11) + h(P00) >= h(P01) + h(P10)`), falling back to its own
/// entropy. Communities with zero entropy (empty or all nodes) contribute 0.
pub fn nmi_overlapping(a: &Cover, b: &Cover) -> Result<f64> {
    if a.node_count() != b.node_count() {
        return Err(Error::Argument(format!(
            "covers over {} and {} nodes",
            a.node_count(),
            b.node_count()
        )));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::Argument("overlapping NMI needs non-empty covers".into()));
    }
    let value = 1.0 - 0.5 * (conditional(a, b) + conditional(b, a));
    Ok(value.clamp(0.0, 1.0))
}

/// Crisp NMI when both covers are partitions of all nodes, overlapping NMI
/// otherwise.
pub fn nmi(a: &Cover, b: &Cover) -> Result<f64> {
    match (a.as_labels(), b.as_labels()) {
        (Some(x), Some(y)) => nmi_crisp(&x, &y),
        _ => nmi_overlapping(a, b),
    }
}

/// Windowed means of consecutive-pair values: position `i` averages the
/// pairs inside the window of `p` sets ending at `i`. `pairs[j]` compares
/// sets `j` and `j + 1`; a window without pairs yields 1.
pub fn windowed_from_pairs(pairs: &[f64], p: usize) -> Result<Vec<f64>> {
    if p < 2 {
        return Err(Error::Argument(format!("window must span at least 2 sets, got {p}")));
    }
    let len = pairs.len() + 1;
    let mut prefix = vec![0.0; len];
    for (j, &v) in pairs.iter().enumerate() {
        prefix[j + 1] = prefix[j] + v;
    }
    Ok((0..len)
        .map(|i| {
            let first = (i + 1).saturating_sub(p);
            let count = i - first;
            if count == 0 {
                1.0
            } else {
                (prefix[i] - prefix[first]) / count as f64
            }
        })
        .collect())
}

/// [`windowed_from_pairs`] over [`nmi`] of consecutive sets.
pub fn windowed_nmi(sets: &[Cover], p: usize) -> Result<Vec<f64>> {
    if sets.is_empty() {
        return Err(Error::Argument("no community sets to compare".into()));
    }
    let pairs = sets.windows(2).map(|w| nmi(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    windowed_from_pairs(&pairs, p)
}
