//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::sync::Mutex;
use std::time::{Duration, Instant};

use common::*;
use mscd_core::benchgen::{generate_two_level, BenchSpec, Benchmark};
use mscd_core::criteria::{modularity, q_afg, q_rb};
use mscd_core::global::{detect_global, optimize_at_scale, GlobalOptions, GlobalRecord};
use mscd_core::graph::community_connected;
use mscd_core::metrics::{nmi_crisp, nmi_overlapping};
use mscd_core::overlap::{detect_local, merge_overlapping, LocalOptions};
use mscd_core::partition::NodeLinks;
use mscd_core::scales::{afg_floor, sweep, CriterionKind, ScalePlan, SweepOptions};
use mscd_core::walk::{stability_q, WalkCache};
use mscd_core::{Cover, GlobalCriterion, GlobalKind, Graph, LocalKind, Objective, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Named = (&'static str, fn() -> Check);

/// Communities returned by global runs, audited for connectivity at the end.
static AUDIT: Mutex<(usize, Vec<String>)> = Mutex::new((0, Vec::new()));

fn audit_partition(g: &Graph, p: &Partition, context: &str) {
    let mut audit = AUDIT.lock().unwrap();
    for c in p.communities() {
        audit.0 += 1;
        if !community_connected(g, &c, None).unwrap() {
            audit.1.push(format!("{context}: community of {} nodes starting at {}", c.len(), c[0]));
        }
    }
}

fn audit_records(g: &Graph, records: &[GlobalRecord], context: &str) {
    for r in records {
        audit_partition(g, &r.partition, &format!("{context} at {}", r.param));
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Check {
    if elapsed.as_secs_f64() < limit_s {
        Ok(format!("{:.2}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()))
    }
}

fn criterion_identities() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n = rng.gen_range(2..=60);
        let density = rng.gen_range(0.05..0.4);
        let (g, edges) = random_graph(&mut rng, n, density, case % 3 == 0);
        if g.total_weight() <= 0.0 {
            continue;
        }
        let k = rng.gen_range(1..8);
        let labels = random_labels(&mut rng, n, k);
        let p = Partition::from_labels(g.view(), &labels).unwrap();
        let reference = q_modularity(&dense(n, &edges), &labels);
        let mut cache = WalkCache::new(&g, 0.0).unwrap();
        for (name, value) in [
            ("modularity", modularity(&g, &p)),
            ("q_rb(1)", q_rb(&g, &p, 1.0).unwrap()),
            ("q_afg(0)", q_afg(&g, &p, 0.0).unwrap()),
            ("stability(1)", stability_q(&g, &p, 1.0, &mut cache).unwrap()),
        ] {
            let err = (value - reference).abs();
            worst = worst.max(err);
            if err > 1e-12 {
                return Err(format!("case {case}: {name} = {value}, modularity = {reference}"));
            }
        }
    }
    within(start.elapsed(), 5.0).map(|t| format!("max deviation {worst:.1e}, {t}"))
}

fn oracle_q(kind: GlobalKind, a: &Dense, labels: &[usize], param: f64) -> f64 {
    match kind {
        GlobalKind::Rb => common::q_rb(a, labels, param),
        GlobalKind::Afg => common::q_afg(a, labels, param),
        GlobalKind::Rn => common::q_rn(a, labels, param),
        GlobalKind::So => q_stability(a, labels, param),
    }
}

fn delta_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let kinds = [GlobalKind::Rb, GlobalKind::Afg, GlobalKind::Rn, GlobalKind::So];
    let (mut moves, mut merges) = (0, 0);
    let mut worst: f64 = 0.0;
    let mut round = 0;
    while moves < 1000 || merges < 1000 {
        round += 1;
        let kind = kinds[round % 4];
        let n = rng.gen_range(4..=25);
        let (g, edges) = random_graph(&mut rng, n, 0.3, round % 2 == 0);
        if g.total_weight() <= 0.0 {
            continue;
        }
        let a = dense(n, &edges);
        let param = match kind {
            GlobalKind::Rb => rng.gen_range(0.0..3.0),
            GlobalKind::Afg => rng.gen_range(-g.min_strength() * 0.9..3.0),
            GlobalKind::Rn => rng.gen_range(0.0..1.0),
            GlobalKind::So => [0.0, 0.5, 1.0, 1.7, 2.0, 3.0][rng.gen_range(0..6)],
        };
        let walk;
        let obj = if kind == GlobalKind::So {
            walk = WalkCache::new(&g, 0.0).unwrap().walk_for_time(param).unwrap();
            Objective::stability(&g, &walk, param).unwrap()
        } else {
            Objective::new(&g, GlobalCriterion { kind, param }).unwrap()
        };
        let k = rng.gen_range(1..n);
        let labels = random_labels(&mut rng, n, k);
        let mut p = Partition::from_labels(obj.view(), &labels).unwrap();
        for _ in 0..20 {
            let before = oracle_q(kind, &a, p.assignment(), param);
            if rng.gen::<bool>() && moves < 1000 {
                let node = rng.gen_range(0..n);
                let target = rng.gen_range(0..p.slot_count());
                if target == p.community_of(node) {
                    continue;
                }
                let predicted = obj.delta_move(&p, node, target).unwrap();
                let links = NodeLinks::compute(obj.view(), &p, node, target);
                p.move_node(node, target, &links).unwrap();
                let err = (predicted - (oracle_q(kind, &a, p.assignment(), param) - before)).abs();
                worst = worst.max(err);
                if err > 1e-9 {
                    return Err(format!("{kind:?}({param}) move of {node}: off by {err:e}"));
                }
                moves += 1;
            } else if merges < 1000 {
                let live: Vec<usize> = p.community_ids().collect();
                if live.len() < 2 {
                    continue;
                }
                let c1 = live[rng.gen_range(0..live.len())];
                let c2 = live[rng.gen_range(0..live.len())];
                if c1 == c2 {
                    continue;
                }
                let predicted = obj.delta_merge(&p, c1, c2).unwrap();
                let between = mscd_core::criteria::weight_between(obj.view(), &p, c1, c2);
                p.merge(c1, c2, between).unwrap();
                let err = (predicted - (oracle_q(kind, &a, p.assignment(), param) - before)).abs();
                worst = worst.max(err);
                if err > 1e-9 {
                    return Err(format!("{kind:?}({param}) merge of {c1},{c2}: off by {err:e}"));
                }
                merges += 1;
            }
        }
    }
    within(start.elapsed(), 30.0).map(|t| format!("{moves} moves, {merges} merges, max deviation {worst:.1e}, {t}"))
}

fn walk_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for case in 0..40 {
        let n = rng.gen_range(2..=50);
        let density = rng.gen_range(0.05..0.3);
        let (g, edges) = random_graph(&mut rng, n, density, case % 2 == 0);
        let a = dense(n, &edges);
        let mut cache = WalkCache::new(&g, 0.0).unwrap();
        for t in 0..=5u32 {
            let want = walk_power(&a, t);
            let got = cache.power(t).unwrap();
            for (i, row) in want.iter().enumerate() {
                for (j, &expected) in row.iter().enumerate() {
                    let err = (got.weight(i, j) - expected).abs();
                    worst = worst.max(err);
                    if err > 1e-9 {
                        return Err(format!("case {case}, t = {t}, entry ({i},{j}) off by {err:e}"));
                    }
                }
            }
        }
    }
    let k3 = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
    let mut cache = WalkCache::new(&k3, 0.0).unwrap();
    let a2 = cache.power(2).unwrap().clone();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.5 };
            if a2.weight(i, j) != want {
                return Err(format!("K3 A_2({i},{j}) = {}", a2.weight(i, j)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (g, _) = random_graph(&mut rng, 30, 0.2, true);
    let mut cache = WalkCache::new(&g, 0.0).unwrap();
    let a1 = cache.power(1).unwrap().clone();
    let a2 = cache.power(2).unwrap().clone();
    let mid = cache.walk_for_time(1.5).unwrap();
    for i in 0..30 {
        for j in 0..30 {
            let err = (mid.weight(i, j) - 0.5 * (a1.weight(i, j) + a2.weight(i, j))).abs();
            if err > 1e-12 {
                return Err(format!("t = 1.5 entry ({i},{j}) off by {err:e}"));
            }
        }
    }
    within(start.elapsed(), 10.0).map(|t| format!("max deviation {worst:.1e}, {t}"))
}

fn exact_optimum() -> Check {
    let g = g7();
    let a = dense(6, &g7_edges());
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for labels in all_partitions(6) {
        let q = q_modularity(&a, &labels);
        if q > best + 1e-12 {
            best = q;
            argmax = vec![groups(&labels)];
        } else if (q - best).abs() <= 1e-12 {
            argmax.push(groups(&labels));
        }
    }
    if argmax.len() != 1 || (best - 5.0 / 14.0).abs() > 1e-12 {
        return Err(format!("exhaustive search gave {} optima at {best}", argmax.len()));
    }
    let recs = detect_global(&g, GlobalKind::Rb, &[1.0], 0.0, 7, &GlobalOptions::default()).map_err(|e| e.to_string())?;
    audit_records(&g, &recs, "G7 RB");
    let found = recs[0].partition.communities();
    if found != argmax[0] {
        return Err(format!("found {found:?}, optimum {:?}", argmax[0]));
    }
    if (recs[0].quality - 5.0 / 14.0).abs() > 1e-12 {
        return Err(format!("Q = {}", recs[0].quality));
    }
    Ok(format!("{found:?}, Q = {:.12}", recs[0].quality))
}

fn connectivity_audit() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..30 {
        let n = rng.gen_range(10..80);
        let (g, _) = random_graph(&mut rng, n, 0.08, false);
        for (kind, params) in [
            (GlobalKind::Rb, vec![3.0, 1.0, 0.3]),
            (GlobalKind::Afg, vec![2.0, 0.0]),
            (GlobalKind::Rn, vec![0.5, 0.05]),
            (GlobalKind::So, vec![0.5, 1.0, 2.5]),
        ] {
            if kind == GlobalKind::Afg && g.min_strength() <= 0.0 {
                continue;
            }
            let recs = detect_global(&g, kind, &params, 0.001, case, &GlobalOptions::default()).map_err(|e| e.to_string())?;
            audit_records(&g, &recs, &format!("random {case} {kind:?}"));
        }
    }
    let audit = AUDIT.lock().unwrap();
    if audit.1.is_empty() {
        Ok(format!("{} communities checked", audit.0))
    } else {
        Err(format!("{} of {} disconnected, first: {}", audit.1.len(), audit.0, audit.1[0]))
    }
}

fn benchmark() -> Benchmark {
    generate_two_level(&BenchSpec::small(0.1, 0.2, 2024)).unwrap()
}

fn best(series: &[f64]) -> (usize, f64) {
    series
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
}

fn two_level_recovery() -> Check {
    let b = benchmark();
    let truths = vec![Cover::from_labels(&b.micro), Cover::from_labels(&b.macro_)];
    let runs: [(CriterionKind, f64, f64, f64); 6] = [
        (CriterionKind::Rb, 50.0, 0.90, 0.90),
        (CriterionKind::Afg, 50.0, 0.90, 0.90),
        (CriterionKind::So, 5.0, 0.90, 0.90),
        (CriterionKind::Rn, 0.1, 0.80, 0.0),
        (CriterionKind::Lfk, 2.0, 0.80, 0.0),
        (CriterionKind::Hlslw, 2.0, 0.80, 0.0),
    ];
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for (kind, a, micro_min, macro_min) in runs {
        let mut plan = ScalePlan::new(kind, a, 50).unwrap();
        if kind == CriterionKind::Afg {
            plan = plan.with_min_value(afg_floor(&b.graph)).unwrap();
        }
        let opts = SweepOptions {
            tau: 0.001,
            seed: 11,
            truths: truths.clone(),
            ..Default::default()
        };
        let start = Instant::now();
        let report = sweep(&b.graph, &plan, &opts).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed().as_secs_f64();
        if kind.global().is_some() {
            for r in &report.records {
                let p = Partition::from_labels(b.graph.view(), &r.cover.as_labels().unwrap()).unwrap();
                audit_partition(&b.graph, &p, &format!("benchmark {kind}"));
            }
        }
        let (mi, micro) = best(&report.nmi_truth[0]);
        let (ma, macro_) = best(&report.nmi_truth[1]);
        let line = format!(
            "{kind}: micro {micro:.3} at {:.4}, macro {macro_:.3} at {:.4}, {elapsed:.1}s",
            report.records[mi].param, report.records[ma].param
        );
        if micro < micro_min || macro_ < macro_min || elapsed >= 120.0 {
            failures.push(line.clone());
        }
        summary.push(line);
    }
    if failures.is_empty() {
        Ok(summary.join("; "))
    } else {
        Err(format!("{} | all: {}", failures.join("; "), summary.join("; ")))
    }
}

fn scaling_trend() -> Check {
    let mut times = Vec::new();
    for n in [20_000usize, 40_000] {
        let spec = BenchSpec {
            n,
            ..BenchSpec::small(0.1, 0.2, 99)
        };
        let b = generate_two_level(&spec).map_err(|e| e.to_string())?;
        let plan = ScalePlan::new(CriterionKind::Rb, 50.0, 20).unwrap();
        let start = Instant::now();
        let report = sweep(&b.graph, &plan, &SweepOptions::default()).map_err(|e| e.to_string())?;
        times.push((b.graph.edge_count(), start.elapsed().as_secs_f64()));
        for r in &report.records {
            let p = Partition::from_labels(b.graph.view(), &r.cover.as_labels().unwrap()).unwrap();
            audit_partition(&b.graph, &p, &format!("scaling n={n}"));
        }
    }
    let ratio = times[1].1 / times[0].1;
    let line = format!(
        "m = {} in {:.2}s, m = {} in {:.2}s, ratio {ratio:.2}",
        times[0].0, times[0].1, times[1].0, times[1].1
    );
    if ratio <= 3.0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn nmi_fixed_points() -> Check {
    let same = nmi_crisp(&[0, 0, 1, 1, 2], &[3, 3, 4, 4, 5]).map_err(|e| e.to_string())?;
    let opposite = nmi_crisp(&[0; 5], &[0, 1, 2, 3, 4]).map_err(|e| e.to_string())?;
    let example = nmi_crisp(&[0, 0, 1, 1], &[0, 0, 0, 1]).map_err(|e| e.to_string())?;
    let cover = Cover::new(7, vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6], vec![1, 5]]).unwrap();
    let own = nmi_overlapping(&cover, &cover).map_err(|e| e.to_string())?;
    let line = format!("identical {same}, all-in-one vs singletons {opposite}, example {example:.4}, cover vs itself {own}");
    if same == 1.0 && opposite == 0.0 && (example - 0.3437).abs() < 1e-3 && (own - 1.0).abs() < 1e-12 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ratio_merges(cover: &Cover, eta: f64) -> bool {
    let c = cover.communities();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let shared = c[i].iter().filter(|v| c[j].contains(v)).count() as f64;
            if shared / c[i].len() as f64 >= eta || shared / c[j].len() as f64 >= eta {
                return true;
            }
        }
    }
    false
}

fn overlap_behaviour() -> Check {
    let g = k4_pair(1);
    let recs = detect_local(&g, LocalKind::Lfk, &[1.0], &LocalOptions::default()).map_err(|e| e.to_string())?;
    let got = recs[0].cover.communities().to_vec();
    if got != vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6]] {
        return Err(format!("shared-node K4 pair gave {got:?}"));
    }
    let h = k4_pair(2);
    let boundary = Cover::new(6, vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5]]).unwrap();
    let merged = merge_overlapping(&boundary, 0.5, false, &h).map_err(|e| e.to_string())?;
    if merged.communities() != [vec![0, 1, 2, 3, 4, 5]] {
        return Err(format!("ratio exactly 0.5 did not merge: {:?}", merged.communities()));
    }
    let kept = merge_overlapping(&boundary, 0.5 + 1e-9, false, &h).map_err(|e| e.to_string())?;
    if kept.len() != 2 {
        return Err("ratio just below eta merged".into());
    }
    let grown = detect_local(&h, LocalKind::Lfk, &[1.0], &LocalOptions::default()).map_err(|e| e.to_string())?;
    if ratio_merges(&grown[0].cover, 0.5) {
        return Err(format!("two-node overlap left unmerged: {:?}", grown[0].cover.communities()));
    }
    Ok(format!(
        "shared node: {got:?}; two shared nodes: {:?}",
        grown[0].cover.communities()
    ))
}

fn warm_start_benefit() -> Check {
    let b = benchmark();
    let plan = ScalePlan::new(CriterionKind::Rb, 50.0, 20).unwrap();
    let params: Vec<f64> = plan.execution_order().iter().map(|&i| plan.values()[i]).collect();
    let opts = GlobalOptions::default();
    let recs = detect_global(&b.graph, GlobalKind::Rb, &params, 0.0, 17, &opts).map_err(|e| e.to_string())?;
    audit_records(&b.graph, &recs, "warm start");
    let mut worse = Vec::new();
    let (mut warm_total, mut cold_total) = (0, 0);
    for r in recs.iter().skip(1) {
        let obj = Objective::new(&b.graph, GlobalCriterion::rb(r.param)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cold = optimize_at_scale(&obj, Partition::singletons(b.graph.view()), &mut rng, &opts).map_err(|e| e.to_string())?;
        audit_partition(&b.graph, &cold.partition, "cold start");
        warm_total += r.node_moves;
        cold_total += cold.node_moves;
        if r.node_moves >= cold.node_moves {
            worse.push(format!("gamma {:.4}: warm {} vs cold {}", r.param, r.node_moves, cold.node_moves));
        }
    }
    let line = format!("{} scales, warm moves {warm_total} vs cold {cold_total}", recs.len() - 1);
    if worse.is_empty() {
        Ok(line)
    } else {
        Err(format!("{line}; not lower at {}", worse.join(", ")))
    }
}

fn main() {
    let checks: [Named; 10] = [
        ("1 criterion identities", criterion_identities),
        ("2 delta oracle", delta_oracle),
        ("3 walk oracle", walk_oracle),
        ("4 exact small-graph optimum", exact_optimum),
        ("6 two-level recovery", two_level_recovery),
        ("7 scaling trend", scaling_trend),
        ("8 NMI fixed points", nmi_fixed_points),
        ("9 overlap behaviour", overlap_behaviour),
        ("10 warm-start benefit", warm_start_benefit),
        // last, so it sees every community produced above
        ("5 connectivity audit", connectivity_audit),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
