//! Dense brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use mscd_core::Graph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

/// Random simple weighted graph; roughly `p` edge density, optional loops.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, loops: bool) -> (Graph, Vec<(usize, usize, f64)>) {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u..n {
            if u == v && !loops {
                continue;
            }
            let chance = if u == v { p / 4.0 } else { p };
            if rng.gen::<f64>() < chance {
                let w = if rng.gen::<bool>() { 1.0 } else { rng.gen_range(0.1..3.0) };
                edges.push((u, v, w));
            }
        }
    }
    (Graph::from_edges(n, edges.iter().copied()).unwrap(), edges)
}

/// Dense adjacency with loops counted twice on the diagonal.
pub fn dense(n: usize, edges: &[(usize, usize, f64)]) -> Dense {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        if u == v {
            a[u][u] += 2.0 * w;
        } else {
            a[u][v] += w;
            a[v][u] += w;
        }
    }
    a
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..k.max(1))).collect()
}

fn row_sums(a: &Dense) -> Vec<f64> {
    a.iter().map(|r| r.iter().sum()).collect()
}

/// `1/2m sum_ij (W_ij - gamma k_i k_j / 2m) [c_i = c_j]` where `k` are the
/// row sums of `strength_source`.
pub fn modularity_form(w: &Dense, strength_source: &Dense, labels: &[usize], gamma: f64) -> f64 {
    let k = row_sums(strength_source);
    let two_m: f64 = k.iter().sum();
    if two_m <= 0.0 {
        return 0.0;
    }
    let n = labels.len();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += w[i][j] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

pub fn q_modularity(a: &Dense, labels: &[usize]) -> f64 {
    modularity_form(a, a, labels, 1.0)
}

pub fn q_rb(a: &Dense, labels: &[usize], gamma: f64) -> f64 {
    modularity_form(a, a, labels, gamma)
}

/// Modularity after adding a self-loop of weight `r` to every node.
pub fn q_afg(a: &Dense, labels: &[usize], r: f64) -> f64 {
    let mut shifted = a.clone();
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] += r;
    }
    modularity_form(&shifted, &shifted, labels, 1.0)
}

/// `1/2 sum_{i != j, same community} (A_ij - gamma (1 - A_ij))`.
pub fn q_rn(a: &Dense, labels: &[usize], gamma: f64) -> f64 {
    let n = labels.len();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && labels[i] == labels[j] {
                q += a[i][j] - gamma * (1.0 - a[i][j]);
            }
        }
    }
    0.5 * q
}

pub fn matmul(x: &Dense, y: &Dense) -> Dense {
    let n = x.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if x[i][k] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += x[i][k] * y[k][j];
            }
        }
    }
    out
}

/// `D M^t` with `M = D^-1 A`; rows of isolated nodes stay zero.
pub fn walk_power(a: &Dense, t: u32) -> Dense {
    let n = a.len();
    let d = row_sums(a);
    let m: Dense = (0..n)
        .map(|i| (0..n).map(|j| if d[i] > 0.0 { a[i][j] / d[i] } else { 0.0 }).collect())
        .collect();
    let mut p: Dense = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..t {
        p = matmul(&p, &m);
    }
    (0..n).map(|i| (0..n).map(|j| d[i] * p[i][j]).collect()).collect()
}

/// Walk network at a possibly fractional time, linear between integer powers.
pub fn walk_at(a: &Dense, t: f64) -> Dense {
    let lo = t.floor();
    let hi = t.ceil();
    if lo == hi {
        return walk_power(a, lo as u32);
    }
    let (x, y) = (walk_power(a, lo as u32), walk_power(a, hi as u32));
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (hi - t) * x[i][j] + (t - lo) * y[i][j]).collect())
        .collect()
}

pub fn q_stability(a: &Dense, labels: &[usize], t: f64) -> f64 {
    modularity_form(&walk_at(a, t), a, labels, 1.0)
}

/// All set partitions of `0..n` as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for l in 0..=max + 1 {
            prefix.push(l);
            rec(prefix, n, if l > max { l } else { max }, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    let mut prefix = vec![0];
    rec(&mut prefix, n, 0, &mut out);
    out
}

/// Groups labels into sorted communities ordered by smallest member.
pub fn groups(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut map = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for (v, &l) in labels.iter().enumerate() {
        map.entry(l).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = map.into_values().collect();
    out.sort();
    out
}

/// Whether `members` induce a connected subgraph of `a`.
pub fn connected_dense(a: &Dense, members: &[usize]) -> bool {
    if members.is_empty() {
        return true;
    }
    let mut seen = vec![false; members.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for (y, s) in seen.iter_mut().enumerate() {
            if !*s && a[members[x]][members[y]] > 0.0 {
                *s = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn g7_edges() -> Vec<(usize, usize, f64)> {
    vec![
        (0, 1, 1.0),
        (1, 2, 1.0),
        (0, 2, 1.0),
        (3, 4, 1.0),
        (4, 5, 1.0),
        (3, 5, 1.0),
        (2, 3, 1.0),
    ]
}

pub fn g7() -> Graph {
    Graph::from_edges(6, g7_edges()).unwrap()
}

/// Two 4-cliques on `0..4` and `4-shared..8-shared`, sharing `shared` nodes.
pub fn k4_pair(shared: usize) -> Graph {
    let a: Vec<usize> = (0..4).collect();
    let b: Vec<usize> = (4 - shared..8 - shared).collect();
    let mut edges = std::collections::BTreeSet::new();
    for block in [a, b] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.insert((block[i], block[j]));
            }
        }
    }
    Graph::from_edges(8 - shared, edges.into_iter().map(|(u, v)| (u, v, 1.0))).unwrap()
}
