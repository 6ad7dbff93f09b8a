mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use signbal::balance::{
    antibalanced_partition_from_bipartite, classify, first_violation, frustration, sign_conflicting_walk, switch,
    FrustrationMode, Target,
};
use signbal::generate::random_signed_tree;
use signbal::spectral::eigendecompose_symmetric;
use signbal::{Bipartition, SignedGraph, Verdict};

fn small_graph() -> impl Strategy<Value = SignedGraph> {
    (1usize..=6, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| random_connected(&mut rng(seed), n, p))
}

fn oracle_verdict(g: &SignedGraph) -> Verdict {
    match cycle_oracle(g) {
        (true, true) => Verdict::Both,
        (true, false) => Verdict::Balanced,
        (false, true) => Verdict::Antibalanced,
        (false, false) => Verdict::StrictlyUnbalanced,
    }
}

#[test]
fn hand_examples_match_cycle_oracle() {
    let tri = |w: [f64; 3]| SignedGraph::new(3, [(0, 1, w[0]), (1, 2, w[1]), (0, 2, w[2])]).unwrap();
    assert_eq!(oracle_verdict(&tri([1.0, 1.0, 1.0])), Verdict::Balanced);
    assert_eq!(classify(&tri([1.0, 1.0, 1.0])).verdict, Verdict::Balanced);
    assert_eq!(oracle_verdict(&tri([1.0, 1.0, -1.0])), Verdict::Antibalanced);
    assert_eq!(classify(&tri([1.0, 1.0, -1.0])).verdict, Verdict::Antibalanced);
    let four = SignedGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, -1.0)]).unwrap();
    assert_eq!(oracle_verdict(&four), Verdict::StrictlyUnbalanced);
    assert_eq!(classify(&four).verdict, Verdict::StrictlyUnbalanced);
    let w = sign_conflicting_walk(&four, 6).expect("witness");
    assert!(w.length <= 6);
}

#[test]
fn bipartite_four_cycle_antibalanced_partition() {
    let g = SignedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
    let bp = Bipartition::new(vec![1, -1, 1, -1]).unwrap();
    let bb = Bipartition::uniform(4);
    let sa = antibalanced_partition_from_bipartite(&g, &bp, &bb).unwrap();
    assert_eq!(sa.signs(), &[1, -1, 1, -1]);
    assert_eq!(first_violation(&g, &sa, Target::Antibalanced).unwrap(), None);
}

#[test]
fn random_trees_are_both() {
    let mut r = rng(11);
    for k in 0..100 {
        let n = r.random_range(1..=50);
        let g = random_signed_tree(n, r.random::<f64>(), k).unwrap();
        assert_eq!(classify(&g).verdict, Verdict::Both, "tree {k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn classify_matches_cycle_enumeration(g in small_graph()) {
        let c = classify(&g);
        prop_assert_eq!(c.verdict, oracle_verdict(&g));
        if let Some(b) = &c.balanced_partition {
            prop_assert_eq!(first_violation(&g, b, Target::Balanced).unwrap(), None);
            prop_assert_eq!(b.signs()[0], 1);
        }
        if let Some(a) = &c.antibalanced_partition {
            prop_assert_eq!(first_violation(&g, a, Target::Antibalanced).unwrap(), None);
            prop_assert_eq!(a.signs()[0], 1);
        }
    }

    #[test]
    fn negation_swaps_balance_and_antibalance(g in small_graph()) {
        let (c, d) = (classify(&g), classify(&g.negate()));
        prop_assert_eq!(c.verdict.is_balanced(), d.verdict.is_antibalanced());
        prop_assert_eq!(c.verdict.is_antibalanced(), d.verdict.is_balanced());
    }

    #[test]
    fn both_means_tree_or_bipartite(g in small_graph()) {
        if classify(&g).verdict == Verdict::Both {
            // cycle-space rank |E| - n + 1 is zero for trees
            let rank = g.edge_count() + 1 - g.n();
            prop_assert!(rank == 0 || g.two_colouring().is_some());
            prop_assert!(g.is_tree() || g.is_bipartite());
        }
    }

    #[test]
    fn switching_preserves_verdict_and_spectrum(g in small_graph(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let s: Vec<i8> = (0..g.n()).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
        let b = Bipartition::new(s).unwrap();
        let h = switch(&g, &b).unwrap();
        prop_assert_eq!(classify(&h).verdict, classify(&g).verdict);
        prop_assert_eq!(switch(&h, &b).unwrap(), g.clone());
        prop_assert_eq!(h.unsigned_counterpart(), g.unsigned_counterpart());
        let a = eigendecompose_symmetric(&g.adjacency()).unwrap().values;
        let z = eigendecompose_symmetric(&h.adjacency()).unwrap().values;
        prop_assert!(max_diff(&a, &z) < 1e-10);
    }

    #[test]
    fn certificate_switching_gives_pure_signs(g in small_graph()) {
        let c = classify(&g);
        if let Some(b) = &c.balanced_partition {
            prop_assert_eq!(switch(&g, b).unwrap(), g.unsigned_counterpart());
        }
        if let Some(a) = &c.antibalanced_partition {
            prop_assert_eq!(switch(&g, a).unwrap(), g.unsigned_counterpart().negate());
        }
    }

    #[test]
    fn conflicting_walk_iff_strictly_unbalanced(g in small_graph()) {
        let strict = oracle_verdict(&g) == Verdict::StrictlyUnbalanced;
        prop_assert_eq!(sign_conflicting_walk(&g, 2 * g.n()).is_some(), strict);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn exact_frustration_matches_edge_subset_search(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let g = loop {
            let g = random_connected(&mut r, n, 0.5);
            if g.edge_count() <= 12 {
                break g;
            }
        };
        for (target, orient) in [(Target::Balanced, 1.0), (Target::Antibalanced, -1.0)] {
            let rep = frustration(&g, target, FrustrationMode::Exact).unwrap();
            prop_assert_eq!(rep.flip_count, min_flips_by_edge_subsets(&g, orient));
            prop_assert_eq!(rep.flip_set.len(), rep.flip_count);
            let flipped = g.map_weights(|e| if rep.flip_set.iter().any(|f| f.i == e.i && f.j == e.j) { -e.w } else { e.w });
            let v = classify(&flipped).verdict;
            let reached = if orient > 0.0 { v.is_balanced() } else { v.is_antibalanced() };
            prop_assert!(reached);
            let heur = frustration(&g, target, FrustrationMode::Heuristic).unwrap();
            prop_assert!(heur.flip_count >= rep.flip_count);
        }
    }
}
