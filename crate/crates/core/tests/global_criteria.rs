mod common;

use common::*;
use mscd_core::criteria::{GlobalCriterion, Objective};
use mscd_core::global::{detect_global, optimize_at_scale, GlobalOptions};
use mscd_core::graph::{community_connected, community_weights};
use mscd_core::walk::{WalkCache, DEFAULT_TAU};
use mscd_core::{Error, GlobalKind, Graph, Partition};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn quality(g: &Graph, crit: GlobalCriterion, labels: &[usize]) -> f64 {
    let obj = Objective::new(g, crit).unwrap();
    obj.quality(&Partition::from_labels(obj.view(), labels).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ledger_quality_matches_dense(seed in any::<u64>(), n in 2usize..24, k in 1usize..6, gamma in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, edges) = random_graph(&mut rng, n, 0.3, true);
        prop_assume!(g.total_weight() > 0.0);
        let a = dense(n, &edges);
        let labels = random_labels(&mut rng, n, k);
        prop_assert!(close(quality(&g, GlobalCriterion::rb(gamma), &labels), q_rb(&a, &labels, gamma), 1e-10));
        prop_assert!(close(quality(&g, GlobalCriterion::rn(gamma), &labels), q_rn(&a, &labels, gamma), 1e-10));
        let r = rng.gen_range(0.0..2.0) - 0.9 * g.min_strength();
        if r != 0.0 && r > -g.min_strength() {
            prop_assert!(close(quality(&g, GlobalCriterion::afg(r), &labels), q_afg(&a, &labels, r), 1e-10));
        }
    }

    #[test]
    fn move_and_merge_deltas_are_exact(seed in any::<u64>(), n in 3usize..20, k in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, edges) = random_graph(&mut rng, n, 0.35, true);
        prop_assume!(g.total_weight() > 0.0);
        let a = dense(n, &edges);
        let labels = random_labels(&mut rng, n, k);
        let gamma = rng.gen_range(0.1..2.0);
        for (crit, oracle) in [
            (GlobalCriterion::rb(gamma), Box::new(move |l: &[usize]| q_rb(&a, l, gamma)) as Box<dyn Fn(&[usize]) -> f64>),
            (GlobalCriterion::rn(gamma), Box::new({ let a = dense(n, &edges); move |l: &[usize]| q_rn(&a, l, gamma) })),
        ] {
            let obj = Objective::new(&g, crit).unwrap();
            let p = Partition::from_labels(obj.view(), &labels).unwrap();
            let node = rng.gen_range(0..n);
            let other = rng.gen_range(0..n);
            let target = p.community_of(other);
            if target != p.community_of(node) {
                let mut after = labels.clone();
                after[node] = labels[other];
                let want = oracle(&after) - oracle(&labels);
                prop_assert!(close(obj.delta_move(&p, node, target).unwrap(), want, 1e-9));
            }
            let ids: Vec<usize> = p.community_ids().collect();
            if ids.len() >= 2 {
                let (c1, c2) = (ids[0], ids[ids.len() - 1]);
                let (l1, l2) = (labels[p.members(c1)[0]], labels[p.members(c2)[0]]);
                let after: Vec<usize> = labels.iter().map(|&l| if l == l2 { l1 } else { l }).collect();
                let want = oracle(&after) - oracle(&labels);
                prop_assert!(close(obj.delta_merge(&p, c1, c2).unwrap(), want, 1e-9));
            }
        }
    }

    #[test]
    fn stability_matches_dense_walk(seed in any::<u64>(), n in 2usize..16, t in 0.0f64..4.0, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, edges) = random_graph(&mut rng, n, 0.4, false);
        prop_assume!(g.total_weight() > 0.0);
        let a = dense(n, &edges);
        let labels = random_labels(&mut rng, n, k);
        let mut cache = WalkCache::new(&g, 0.0).unwrap();
        let walk = cache.walk_for_time(t).unwrap();
        let obj = Objective::stability(&g, &walk, t).unwrap();
        let p = Partition::from_labels(obj.view(), &labels).unwrap();
        prop_assert!(close(obj.quality(&p), q_stability(&a, &labels, t), 1e-9));
    }

    #[test]
    fn partition_ledgers_cover_total_weight(seed in any::<u64>(), n in 1usize..30, k in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _) = random_graph(&mut rng, n, 0.2, true);
        let labels = random_labels(&mut rng, n, k);
        let (w_in, w_tot) = groups(&labels)
            .iter()
            .map(|c| community_weights(&g, c))
            .fold((0.0, 0.0), |acc, w| (acc.0 + w.0, acc.1 + w.1));
        prop_assert!(close(w_tot, g.total_weight(), 1e-12));
        prop_assert!(w_in <= g.total_weight() + 1e-9);
        let strengths: f64 = g.strengths().iter().sum();
        prop_assert!(close(strengths, g.total_weight(), 1e-12));
    }

    #[test]
    fn detected_communities_stay_connected(seed in any::<u64>(), n in 4usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _) = random_graph(&mut rng, n, 0.12, false);
        let opts = GlobalOptions::default();
        for (kind, params) in [
            (GlobalKind::Rb, vec![4.0, 1.0, 0.3, 0.0]),
            (GlobalKind::Rn, vec![1.0, 0.2, 0.0]),
            (GlobalKind::So, vec![0.0, 1.0, 2.5, 6.0]),
        ] {
            for rec in detect_global(&g, kind, &params, DEFAULT_TAU, seed, &opts).unwrap() {
                for c in rec.partition.communities() {
                    prop_assert!(community_connected(&g, &c, None).unwrap());
                }
            }
        }
    }

    #[test]
    fn optimiser_never_lowers_quality(seed in any::<u64>(), n in 3usize..30, gamma in 0.05f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _) = random_graph(&mut rng, n, 0.2, false);
        prop_assume!(g.total_weight() > 0.0);
        let obj = Objective::new(&g, GlobalCriterion::rb(gamma)).unwrap();
        let start = Partition::singletons(obj.view());
        let q0 = obj.quality(&start);
        let out = optimize_at_scale(&obj, start, &mut rng, &GlobalOptions::default()).unwrap();
        prop_assert!(out.quality >= q0 - 1e-12);
        prop_assert!(close(out.quality, obj.quality_from_scratch(&out.partition), 1e-10));
    }
}

#[test]
fn modularity_identities_at_unit_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..30 {
        let n = rng.gen_range(2..20);
        let (g, edges) = random_graph(&mut rng, n, 0.3, true);
        if g.total_weight() == 0.0 {
            continue;
        }
        let a = dense(n, &edges);
        let labels = random_labels(&mut rng, n, 4);
        let q = q_modularity(&a, &labels);
        assert!(close(quality(&g, GlobalCriterion::rb(1.0), &labels), q, 1e-12));
        assert!(close(quality(&g, GlobalCriterion::afg(0.0), &labels), q, 1e-12));
        let mut cache = WalkCache::new(&g, 0.0).unwrap();
        let walk = cache.walk_for_time(1.0).unwrap();
        let obj = Objective::stability(&g, &walk, 1.0).unwrap();
        let p = Partition::from_labels(obj.view(), &labels).unwrap();
        assert!(close(obj.quality(&p), q, 1e-12));
    }
}

#[test]
fn g7_weights_and_connectivity() {
    let g = g7();
    assert_eq!(community_weights(&g, &[0, 1, 2]), (6.0, 7.0));
    assert_eq!(community_weights(&g, &[]), (0.0, 0.0));
    assert!(community_connected(&g, &[0, 1, 2, 3], Some(3)).unwrap());
    assert!(!community_connected(&g, &[0, 1, 2, 3], Some(2)).unwrap());
    assert!(community_connected(&g, &[4], None).unwrap());
    assert!(matches!(community_connected(&g, &[0, 1], Some(5)), Err(Error::Contract(_))));
}

#[test]
fn g7_exhaustive_optimum_is_found() {
    let g = g7();
    let a = dense(6, &g7_edges());
    for gamma in [0.05, 0.3, 0.6, 1.0, 1.5, 2.5, 4.0] {
        let best = all_partitions(6)
            .into_iter()
            .filter(|l| groups(l).iter().all(|c| connected_dense(&a, c)))
            .map(|l| q_rb(&a, &l, gamma))
            .fold(f64::NEG_INFINITY, f64::max);
        let rec = detect_global(&g, GlobalKind::Rb, &[gamma], 0.0, 3, &GlobalOptions::default()).unwrap();
        assert!(close(rec[0].quality, best, 1e-12), "gamma {gamma}: {} vs {best}", rec[0].quality);
    }
}

#[test]
fn domain_errors() {
    let g = g7();
    assert!(matches!(Objective::new(&g, GlobalCriterion::rb(-0.1)), Err(Error::Domain(_))));
    assert!(matches!(Objective::new(&g, GlobalCriterion::rn(-1.0)), Err(Error::Domain(_))));
    assert!(matches!(Objective::new(&g, GlobalCriterion::afg(-2.0)), Err(Error::Domain(_))));
    assert!(Objective::new(&g, GlobalCriterion::afg(-1.99)).is_ok());
    let mut cache = WalkCache::new(&g, 0.0).unwrap();
    assert!(matches!(cache.walk_for_time(-1.0), Err(Error::Domain(_))));
}
