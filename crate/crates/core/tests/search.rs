use flagcert::graphs::{graph6, DenseGraph, Graph};
use flagcert::objectives::{gamma_edge, lambda_eval};
use flagcert::patterns::{blowup_build, Pattern};
use flagcert::scalar::{int, rat};
use flagcert::search::*;
use flagcert::Rational;
use proptest::prelude::*;

#[test]
fn five_cycle_to_complete_bipartite() {
    let c5 = Graph::cycle(5);
    let b = Pattern::parse("2:01").unwrap();
    let exact = edit_distance_to_blowup(&c5, &b, true, 0);
    // 2^5 assignments by hand
    let mut best = u64::MAX;
    for mask in 0u32..32 {
        let mut c = 0;
        for u in 0..5 {
            for v in u + 1..5 {
                let want = (mask >> u & 1) != (mask >> v & 1);
                c += (c5.has_edge(u, v) != want) as u64;
            }
        }
        best = best.min(c);
    }
    assert_eq!(exact.value, best);
    assert_eq!(best, 3);
}

#[test]
fn edge_count_of_sampled_bipartite_graph() {
    let k = complete_bipartite_dense(30, 30);
    let p = rat(5, 6);
    let mean: f64 = (0..100).map(|s| sample_subgraph(&k, &p, s).unwrap().edge_count() as f64).sum::<f64>() / 100.0;
    // 900 trials of 5/6 per sample, averaged over 100 samples
    let sigma = (900.0 * 5.0 / 36.0 / 100.0f64).sqrt();
    assert!((mean - 750.0).abs() < 3.0 * sigma, "mean {mean}");
}

#[test]
fn sampled_bipartite_graph_is_quasirandom() {
    let g = sample_subgraph(&complete_bipartite_dense(40, 40), &rat(5, 6), 7).unwrap();
    let part: Vec<usize> = (0..80).map(|v| (v >= 40) as usize).collect();
    let r = quasirandom_check(&g, &part, 5.0 / 6.0, 0.05).unwrap();
    assert!(r.within_tolerance, "{r:?}");
}

#[test]
fn complement_duality_of_records() {
    for (k, l) in [(4, 1), (4, 2), (5, 3)] {
        let a = brute_max(&gamma_edge(k, l).unwrap(), 6, None).unwrap();
        let b = brute_max(&gamma_edge(k, k * (k - 1) / 2 - l).unwrap(), 6, None).unwrap();
        assert_eq!(a.max, b.max);
        let mut comp: Vec<String> = a
            .argmax
            .iter()
            .map(|s| graph6::encode(&flagcert::graphs::canonical_form(&graph6::decode(s).unwrap().complement()).graph))
            .collect();
        comp.sort();
        let mut other = b.argmax.clone();
        other.sort();
        assert_eq!(comp, other);
    }
}

#[test]
fn brute_force_dominates_split_graphs() {
    let gamma = gamma_edge(4, 3).unwrap();
    for n in 4..=7u64 {
        let r = brute_max(&gamma, n as usize, None).unwrap();
        for m in 0..=n {
            assert!(r.max >= Rational::from_integer(split_value(n, m)));
        }
    }
}

#[test]
fn increment_sign_change_at_n_100() {
    // m* = (99 + sqrt(295))/2 is about 58.09
    let n = int(100);
    let a = increment_formula(&n, &int(58));
    let b = increment_formula(&n, &int(59));
    assert!(a.clone() * b < int(0), "{a} vs next");
    assert_eq!(increment_formula(&int(9), &int(4)), int(0));
}

#[test]
fn local_search_fixed_point_on_extremal_graph() {
    let gamma = gamma_edge(4, 3).unwrap();
    let r = brute_max(&gamma, 7, None).unwrap();
    let g = DenseGraph::from_graph(&graph6::decode(&r.argmax[0]).unwrap());
    let out = local_search(&gamma, &g, 100, 1).unwrap();
    assert!(out.local_optimum);
    assert_eq!(out.value, r.max);
}

#[test]
fn local_search_on_random_twelve_vertex_graphs() {
    let gamma = gamma_edge(4, 3).unwrap();
    let target = (0..=12).map(|m| Rational::from_integer(split_value(12, m))).max().unwrap();
    let mut hits = 0;
    for seed in 0..20 {
        let g = sample_subgraph(&complete_dense(12), &rat(1, 2), seed).unwrap();
        let out = local_search(&gamma, &g, 2000, seed).unwrap();
        assert_eq!(out.value, lambda_eval(&gamma, &out.graph).unwrap().0);
        assert!(out.value >= lambda_eval(&gamma, &g).unwrap().0);
        hits += (out.value >= target) as usize;
    }
    eprintln!("{hits}/20 reached {target}");
    assert!(hits >= 18, "{hits}/20 reached the split value");
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn blowup_edit_distance_is_zero(sizes in proptest::collection::vec(0usize..4, 3), seed in 0u64..100) {
        let b = Pattern::parse("3:00,01,12").unwrap();
        let g = blowup_build(&b, &sizes).unwrap();
        prop_assert_eq!(edit_distance_to_blowup(&g, &b, true, seed).value, 0);
    }

    #[test]
    fn heuristic_never_beats_exact(bits in 0u32..(1 << 21), seed in 0u64..1000) {
        let g = Graph::from_bits(7, bits as u128);
        let b = Pattern::parse("3:00,01,12").unwrap();
        let e = edit_distance_to_blowup(&g, &b, true, seed).value;
        let h = edit_distance_to_blowup(&g, &b, false, seed).value;
        prop_assert!(h >= e);
    }
}
