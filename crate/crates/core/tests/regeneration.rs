//! Monte Carlo regeneration experiments against exact absorbing solves.

use std::collections::BTreeMap;

use proptest::prelude::*;

use ramwalk::graph::{build_named, build_random_regular, build_random_regular_girth, girth, inflate};
use ramwalk::hitting::{sphere_hit_distribution, w_kernel, w_vs_k_report};
use ramwalk::walk::{empirical_y_kernel, first_blocks, replay, simulate_walk};

#[test]
fn sphere_hitting_law_matches_monte_carlo() {
    // Excess > 0, so the law is not uniform and the comparison is informative.
    let g = build_named("prism", &[5]).unwrap();
    let exact = sphere_hit_distribution(&g, 0, 2).unwrap();
    assert!(exact.excess > 0);
    let trials = 100_000;
    let traces = first_blocks(&g, 0, 2, trials, 77).unwrap();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for tr in &traces {
        *counts.entry(*tr.positions.last().unwrap()).or_default() += 1;
    }
    assert_eq!(counts.keys().copied().collect::<Vec<_>>(), exact.sphere);
    for (u, &p) in exact.sphere.iter().zip(&exact.probabilities) {
        let f = counts[u] as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * se, "vertex {u}: empirical {f}, exact {p}, se {se}");
    }
}

#[test]
fn y_kernel_error_shrinks_with_trials() {
    let g = build_random_regular(60, 3, 8).unwrap();
    let anchors = [0, 17, 42];
    let coarse = empirical_y_kernel(&g, 2, &anchors, 1_000, 3).unwrap();
    let fine = empirical_y_kernel(&g, 2, &anchors, 100_000, 3).unwrap();
    assert!(fine.max_tv < coarse.max_tv, "{} vs {}", fine.max_tv, coarse.max_tv);
    assert!(fine.max_tv < 0.01);
}

#[test]
fn w_equals_k_above_the_girth_threshold() {
    for (g, k) in [
        (build_named("petersen", &[]).unwrap(), 2),
        (build_named("hypercube", &[4]).unwrap(), 1),
        (build_random_regular_girth(120, 3, 7, 9).unwrap(), 3),
        (build_random_regular_girth(300, 4, 5, 2).unwrap(), 2),
    ] {
        assert!(girth(&g).unwrap() > 2 * k);
        let r = w_vs_k_report(&g, k).unwrap();
        assert!((r.min_ratio - 1.0).abs() <= 1e-10 && (r.max_ratio - 1.0).abs() <= 1e-10, "{}", g.provenance());
        assert!(r.min_k_scaled >= 1.0 - 1e-12);
        assert!(r.pass);
    }
}

#[test]
fn w_support_is_the_inflated_graph() {
    let g = build_random_regular(50, 3, 4).unwrap();
    let h = inflate(&g, 2).unwrap();
    let w = w_kernel(&g, 2).unwrap();
    for x in 0..g.n() {
        let support: Vec<usize> = w.rows[x].iter().map(|&(y, _)| y).collect();
        let mut nbrs = h.neighbors(x).to_vec();
        nbrs.sort_unstable();
        assert_eq!(support, nbrs);
        let total: f64 = w.rows[x].iter().map(|&(_, p)| p).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn replay_recovers_regenerations(seed in 0u64..1000, start in 0usize..30, k in 1usize..4) {
        let g = build_random_regular(30, 3, seed % 7).unwrap();
        let tr = simulate_walk(&g, start, 400, k, seed, 1).unwrap();
        let (regen, good, u) = replay(&g, &tr.positions, k).unwrap();
        prop_assert_eq!(&regen, &tr.regenerations);
        prop_assert_eq!(&good, &tr.good);
        prop_assert_eq!(&u, &tr.u);
        for w in tr.regenerations.windows(2) {
            prop_assert_eq!(g.distance(tr.positions[w[0]], tr.positions[w[1]]), Some(k));
        }
    }

    #[test]
    fn sphere_law_dominates_the_tree_bound(seed in 0u64..500, v in 0usize..40, k in 1usize..4) {
        let g = build_random_regular(40, 3, seed).unwrap();
        let h = sphere_hit_distribution(&g, v, k).unwrap();
        prop_assert!((h.total - 1.0).abs() <= 1e-10);
        prop_assert!(h.min_probability >= h.lower_bound - 1e-12);
        prop_assert!(h.c_hat >= 1.0 - 1e-12);
    }
}
