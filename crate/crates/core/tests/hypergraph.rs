use hyperdev_core::oracle::DEFAULT_ENUMERATION_LIMIT;
use hyperdev_core::{exact_distribution_m, gen_ap, gen_random, gen_sidon, Family, Vertex, WeightedHypergraph};
use num_rational::BigRational;
use proptest::prelude::*;

fn arb_hypergraph() -> impl Strategy<Value = WeightedHypergraph> {
    (5u32..=14, 2usize..=4, 0usize..=30, any::<u64>())
        .prop_filter("k <= N", |(n, k, _, _)| *k as u32 <= *n)
        .prop_map(|(n, k, e, seed)| gen_random(n, k, e.min(choose(n, k)), seed).unwrap())
}

fn arb_subset(n: u32) -> impl Strategy<Value = Vec<Vertex>> {
    proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 0..=n as usize)
}

fn with_subset() -> impl Strategy<Value = (WeightedHypergraph, Vec<Vertex>)> {
    arb_hypergraph().prop_flat_map(|h| {
        let n = h.n();
        (Just(h), arb_subset(n))
    })
}

fn choose(n: u32, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n as usize - i) / (i + 1))
}

proptest! {
    #[test]
    fn count_is_between_zero_and_total((h, b) in with_subset()) {
        let c = h.edge_count_in_subset(&b).unwrap();
        prop_assert!(c >= 0.0 && c <= h.total_weight());
    }

    #[test]
    fn degrees_sum_to_k_times_weight(h in arb_hypergraph()) {
        let sum: f64 = h.degrees().iter().sum();
        prop_assert!((sum - h.k() as f64 * h.total_weight()).abs() <= 1e-12 * sum.max(1.0));
    }

    #[test]
    fn link_weight_is_degree(h in arb_hypergraph(), x in 1u32..=5) {
        let link = h.link(x).unwrap();
        prop_assert_eq!(link.total_weight(), h.degree(x).unwrap());
    }

    #[test]
    fn count_is_monotone((h, b) in with_subset(), extra in 1u32..=14) {
        let mut bigger = b.clone();
        if extra <= h.n() && !bigger.contains(&extra) {
            bigger.push(extra);
        }
        prop_assert!(h.edge_count_in_subset(&b).unwrap() <= h.edge_count_in_subset(&bigger).unwrap());
    }

    #[test]
    fn max_degree_bounded_by_set_degree(h in arb_hypergraph()) {
        let d1 = h.max_r_degree(1).unwrap();
        for r in 2..=h.k() {
            let bound = (h.n() as f64).powi(r as i32 - 1) * h.max_r_degree(r).unwrap();
            prop_assert!(d1 <= bound + 1e-9);
        }
    }
}

fn subsets(items: &[Vertex], r: usize) -> Vec<Vec<Vertex>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], r - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Mean over all m-subsets by direct enumeration equals expected_count, and
/// the enumeration oracle agrees.
#[test]
fn averaging_identity() {
    let mut rng_seed = 11;
    for n in [6u32, 9, 12] {
        for k in [2usize, 3] {
            let h = gen_random(n, k, 2 * n as usize, rng_seed).unwrap();
            rng_seed += 1;
            let vertices: Vec<Vertex> = (1..=n).collect();
            for m in 0..=n {
                let all = subsets(&vertices, m as usize);
                let mut total = 0i64;
                for b in &all {
                    total += h.edges().filter(|(e, _)| e.iter().all(|v| b.contains(v))).count() as i64;
                }
                let mean = BigRational::new(total.into(), (all.len() as i64).into());
                assert_eq!(mean, h.expected_count_exact::<BigRational>(m).unwrap(), "N={n} k={k} m={m}");
                let pmf = exact_distribution_m(&h, m, DEFAULT_ENUMERATION_LIMIT).unwrap();
                assert_eq!(pmf.mean(), mean);
            }
        }
    }
}

#[test]
fn ap_five_examples() {
    let h = gen_ap(5, 3).unwrap();
    assert_eq!(h.edge_count_in_subset(&[1, 2, 3]).unwrap(), 1.0);
    assert_eq!(h.edge_count_in_subset(&[]).unwrap(), 0.0);
    assert_eq!(h.edge_count_in_subset(&[1, 2, 3, 4, 5]).unwrap(), 4.0);
    assert_eq!(h.degree(3).unwrap(), 4.0);
    assert_eq!(h.set_degree(&[1, 5]).unwrap(), 1.0);
    assert_eq!(h.set_degree(&[]).unwrap(), 4.0);
    assert_eq!(h.max_r_degree(3).unwrap(), 1.0);
    let s = h.degree_stats();
    assert!((s.mean_degree - 2.4).abs() < 1e-12);
    assert!((s.degree_variance - 0.64).abs() < 1e-12);
    assert!((h.expected_count(3).unwrap() - 0.4).abs() < 1e-12);
    assert_eq!(h.expected_count(2).unwrap(), 0.0);
    assert_eq!(h.expected_count(5).unwrap(), 4.0);
    assert!((h.deviation_m(&[1, 3, 5]).unwrap() - 0.6).abs() < 1e-12);

    let link = h.link(3).unwrap();
    let mut edges: Vec<Vec<Vertex>> = link.edges().map(|(e, _)| e.to_vec()).collect();
    edges.sort();
    assert_eq!(edges, vec![vec![1, 2], vec![1, 5], vec![2, 4], vec![4, 5]]);
    assert!(link.edges().all(|(_, w)| w == 1.0));

    let d1 = h.derived(1).unwrap();
    let weights: Vec<f64> = (1..=5).map(|x| d1.edge_weight(&[x]).unwrap_or(0.0)).collect();
    assert_eq!(weights, vec![2.0, 2.0, 4.0, 2.0, 2.0]);
}

#[test]
fn ap_nine_max_degree_is_median_vertex() {
    let h = gen_ap(9, 3).unwrap();
    let brute = (1..=9).map(|x| h.degree(x).unwrap()).fold(0.0, f64::max);
    assert_eq!(h.max_r_degree(1).unwrap(), brute);
    assert_eq!(h.max_r_degree(1).unwrap(), h.degree(5).unwrap());
}

#[test]
fn sidon_small_cases() {
    let h = gen_sidon(4).unwrap();
    assert_eq!(h.edge_count(), 1);
    let link = h.link(1).unwrap();
    assert_eq!(link.edges().map(|(e, w)| (e.to_vec(), w)).collect::<Vec<_>>(), vec![(vec![2, 3, 4], 1.0)]);
    assert_eq!(gen_ap(4, 4).unwrap().edge_count(), 1);
}

#[test]
fn ap_structure_and_limits() {
    for (n, tol) in [(500u32, 0.05), (1000, 0.02), (2000, 0.01)] {
        let s = Family::Ap { n, k: 3 }.degree_stats().unwrap();
        let nf = n as f64;
        assert!((s.mean_degree / nf / 0.75 - 1.0).abs() < tol, "N={n}");
        assert!((s.degree_variance / (nf * nf) * 48.0 - 1.0).abs() < tol, "N={n}");
    }
    for k in 3..=5usize {
        for n in [20u32, 100, 400] {
            let h = gen_ap(n, k).unwrap();
            let bound = k as f64 * n as f64 / (k as f64 - 1.0) + k as f64;
            assert!(h.degrees().iter().all(|&d| d <= bound));
            assert!(h.max_r_degree(2).unwrap() <= (k * k) as f64);
        }
    }
}

#[test]
fn sidon_degree_formula_at_midpoint() {
    let n = 1500u32;
    let a = n / 2;
    let degrees = Family::Sidon { n }.degrees();
    let nf = n as f64;
    let af = a as f64;
    let predicted = nf * nf / 4.0 + af * (nf - af) / 2.0;
    assert!((degrees[a as usize - 1] / predicted - 1.0).abs() < 0.02);
}

#[test]
fn random_generator_is_deterministic() {
    let a = gen_random(30, 3, 40, 9).unwrap();
    let b = gen_random(30, 3, 40, 9).unwrap();
    assert!(a.edges().eq(b.edges()));
    assert_eq!(gen_random(30, 3, 0, 9).unwrap().edge_count(), 0);
}
