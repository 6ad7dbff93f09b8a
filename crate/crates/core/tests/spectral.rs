mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use signbal::balance::{classify, switch};
use signbal::generate::{ssbm, SsbmParams};
use signbal::spectral::{
    bipartite_patterns, leading_eigenpair_pattern, perron_vectors_balanced, perturbation_estimate,
    perturbation_estimate_antibalanced, strict_unbalance_contraction, verify_spectral_theorem, SpectralError,
};
use signbal::{Bipartition, SignedGraph, Verdict};

fn params(eta: f64, seed: u64) -> SsbmParams {
    SsbmParams { n1: 6, n2: 10, p_in: 0.8, p_out: 0.1, eta, alpha: 0.1, seed }
}

fn small_graph() -> impl Strategy<Value = SignedGraph> {
    (2usize..=8, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| random_connected(&mut rng(seed), n, p))
}

#[test]
fn triangle_measures() {
    let tri = |w: f64| SignedGraph::new(3, [(0, 1, w), (1, 2, w), (0, 2, w)]).unwrap();
    let m = strict_unbalance_contraction(&tri(1.0)).unwrap();
    assert!(m.d_b.abs() < 1e-12 && (m.d_a - 0.5).abs() < 1e-12);
    let m = strict_unbalance_contraction(&tri(-1.0)).unwrap();
    assert!((m.d_b - 0.5).abs() < 1e-12 && m.d_a.abs() < 1e-12);
    assert!(m.contraction.abs() < 1e-12);
}

#[test]
fn planted_bipartition_is_recovered() {
    for seed in 0..20 {
        let p = params(0.0, seed);
        let g = ssbm(&p).unwrap();
        let c = classify(&g);
        if g.is_bipartite() {
            continue;
        }
        let b = leading_eigenpair_pattern(&g, &c).unwrap();
        assert!(b.equivalent(&p.planted_bipartition()), "seed {seed}");
        let (u, w) = perron_vectors_balanced(&g, &p.planted_bipartition()).unwrap();
        let pm = g.transition_matrix();
        assert!(max_diff(&pm.mul_vec(&u), &u) < 1e-12);
        let d = g.degree_vector().d;
        assert!(max_diff(&pm.vec_mul(&w), &w) < 1e-12 * d.iter().fold(1.0, |a: f64, x| a.max(*x)));
    }
}

#[test]
fn bipartite_balanced_uses_fallback() {
    let g = SignedGraph::new(4, [(0, 1, 1.0), (1, 2, -1.0), (2, 3, 1.0), (0, 3, -1.0)]).unwrap();
    let c = classify(&g);
    assert!(matches!(leading_eigenpair_pattern(&g, &c), Err(SpectralError::Bipartite)));
    let bp = bipartite_patterns(&g).unwrap();
    assert!(bp.degenerate_pair);
    assert!(bp.balanced.equivalent(c.balanced_partition.as_ref().unwrap()));
    assert!(bp.antibalanced.equivalent(c.antibalanced_partition.as_ref().unwrap()));
}

#[test]
fn perturbation_formula_is_exact() {
    let g = ssbm(&params(0.0, 3)).unwrap();
    let e = g.edges()[0];
    let est = perturbation_estimate(&g, &[(e.i, e.j)]).unwrap();
    // one edge of weight α among E_tot edges: m = α E_tot
    let want = -2.0 / g.edge_count() as f64;
    assert!((est.predicted - want).abs() < 1e-15);
    assert!(perturbation_estimate(&g, &[]).unwrap().realized.abs() < 1e-12);
    let ga = ssbm(&params(1.0, 3)).unwrap();
    let e = ga.edges()[0];
    let est = perturbation_estimate_antibalanced(&ga, &[(e.i, e.j)]).unwrap();
    assert!((est.predicted - 2.0 / ga.edge_count() as f64).abs() < 1e-15);
    assert!(est.realized > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn contraction_iff_strictly_unbalanced(g in small_graph()) {
        let m = strict_unbalance_contraction(&g).unwrap();
        let strict = !cycle_oracle(&g).0 && !cycle_oracle(&g).1;
        prop_assert_eq!(m.rho_signed < m.rho_unsigned - 1e-9, strict);
        let (b, a) = cycle_oracle(&g);
        prop_assert_eq!(m.d_b.abs() < 1e-8, b);
        prop_assert_eq!(m.d_a.abs() < 1e-8, a);
        prop_assert!(m.d_b >= -1e-10 && m.d_a >= -1e-10);
    }

    #[test]
    fn measures_are_scale_and_switch_invariant(g in small_graph(), seed in any::<u64>()) {
        let m = strict_unbalance_contraction(&g).unwrap();
        for c in [10.0, 0.01] {
            let s = strict_unbalance_contraction(&g.map_weights(|e| e.w * c)).unwrap();
            prop_assert!((s.d_b - m.d_b).abs() < 1e-10 && (s.d_a - m.d_a).abs() < 1e-10);
        }
        let mut r = rng(seed);
        let b = Bipartition::new((0..g.n()).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect()).unwrap();
        let s = strict_unbalance_contraction(&switch(&g, &b).unwrap()).unwrap();
        prop_assert!((s.d_b - m.d_b).abs() < 1e-10 && (s.d_a - m.d_a).abs() < 1e-10);
    }

    #[test]
    fn spectral_theorem_on_ssbm(seed in any::<u64>(), anti in any::<bool>()) {
        let g = ssbm(&params(if anti { 1.0 } else { 0.0 }, seed)).unwrap();
        let c = classify(&g);
        let rep = verify_spectral_theorem(&g, &c).unwrap();
        prop_assert!(rep.max_eigenvalue_deviation() < 1e-9);
        prop_assert!(rep.max_eigenvector_deviation() < 1e-8);
        // independent route: nalgebra spectra of W and W̄
        let signed = na_symmetric_eigenvalues(&g.adjacency());
        let mut bar = na_symmetric_eigenvalues(&g.unsigned_counterpart().adjacency());
        if anti {
            bar = bar.iter().rev().map(|x| -x).collect();
        }
        prop_assert!(max_diff(&signed, &bar) < 1e-9);
    }
}

#[test]
fn strictly_unbalanced_rejected_by_spectral_theorem() {
    let four = SignedGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, -1.0)]).unwrap();
    let c = classify(&four);
    assert_eq!(c.verdict, Verdict::StrictlyUnbalanced);
    assert!(verify_spectral_theorem(&four, &c).is_err());
    let m = strict_unbalance_contraction(&four).unwrap();
    assert!(m.d_b > 0.0 && m.d_a > 0.0 && m.contraction > 0.0);
}
