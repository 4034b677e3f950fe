use hyperdev_core::rates::{
    freedman_bound, freedman_converse_factor, gamma_k, hoeffding_azuma_bound, optimal_split, rate_m, rate_p,
    rate_p_sidon, theta_k, w3_regime, window_check_m, ConverseFreedman, Regime, WindowOptions,
};
use hyperdev_core::{gen_ap, DegreeStats, Family};
use proptest::prelude::*;

#[test]
fn theta_4_against_degree_variance() {
    let n = 2000u32;
    let s = gen_ap(n, 4).unwrap().degree_stats();
    let ratio = s.degree_variance / (n as f64).powi(2) / theta_k(4).unwrap();
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn gamma_against_raw_statistics() {
    let n = 2000u32;
    for k in 3..=4usize {
        let s = gen_ap(n, k).unwrap().degree_stats();
        let raw = (s.mean_degree.powi(2) + s.degree_variance) / s.total_weight.powi(2) * (n as f64).powi(2);
        let ratio = raw / gamma_k(k).unwrap();
        assert!((ratio - 1.0).abs() < 0.02, "k = {k}: {ratio}");
    }
}

#[test]
fn normalizer_gives_exponent_one_half() {
    let s = gen_ap(500, 3).unwrap().degree_stats();
    let w = WindowOptions::default();
    let sigma = rate_m(&s, 0.3, 0.0, &w).unwrap().normalizer;
    assert!((rate_m(&s, 0.3, sigma, &w).unwrap().exponent - 0.5).abs() < 1e-12);
    assert_eq!(rate_p(&s, 0.2, 0.0, &w).unwrap().exponent, 0.0);
}

#[test]
fn sidon_binomial_rate() {
    let n = 1500u32;
    let s = Family::Sidon { n }.degree_stats().unwrap();
    let (p, delta) = (0.05, 0.1);
    let raw = rate_p(&s, p, delta, &WindowOptions::default()).unwrap();
    let closed = rate_p_sidon(n, p, delta).unwrap();
    assert!((raw.exponent / closed - 1.0).abs() < 0.03);
    assert!(raw.notes.iter().any(|n| n.starts_with("r = 3")), "{:?}", raw.notes);
}

#[test]
fn regular_hypergraph_has_no_uniform_rate() {
    let s = DegreeStats::from_degrees(&[3.0; 10], 3, 10.0, vec![3.0, 1.0, 1.0]);
    assert!(rate_m(&s, 0.3, 1.0, &WindowOptions::default()).is_err());
}

#[test]
fn regimes() {
    assert_eq!(w3_regime(1_000_000, 0.1, 1e-2).unwrap().label, Regime::Normal);
    let r = w3_regime(1_000_000, 1e-3, 0.5).unwrap();
    let min = r.normal_term.min(r.poisson_term).min(r.localized_term);
    assert_eq!(r.value, min);
    assert!(r.conjectural);
    // Normal and Poisson tie where 3/(56(1-p)) = p²N/8.
    let p: f64 = 0.5;
    let n = (3.0 * 8.0 / (56.0 * (1.0 - p) * p * p)) as u32;
    let tie = w3_regime(n, p, 1.0).unwrap();
    if tie.normal_term == tie.poisson_term {
        assert_eq!(tie.label, Regime::Normal);
    }
}

#[test]
fn bounds() {
    let b = freedman_bound(3.0, 2.0, 1e-12).unwrap();
    assert!((b - (-9.0f64 / 4.0).exp()).abs() < 1e-10);
    assert!((hoeffding_azuma_bound(2.0, 4.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
    match freedman_converse_factor(100.0, 100.0, 0.01).unwrap() {
        ConverseFreedman::Applicable { factor, .. } => assert!(factor > 0.0),
        other => panic!("{other:?}"),
    }
    // α²/β = 9 is below 16 log 64, so no δ <= 1 qualifies.
    assert!(matches!(
        freedman_converse_factor(30.0, 100.0, 0.01).unwrap(),
        ConverseFreedman::NotApplicable { .. }
    ));
}

#[test]
fn split_edge_cases() {
    let s = DegreeStats::from_degrees(&[2.0; 12], 3, 8.0, vec![2.0, 1.0, 1.0]);
    assert_eq!(optimal_split(&s, 0.3, 0.1).unwrap().eta_star, 1.0);
    let mut s = gen_ap(50, 3).unwrap().degree_stats();
    s.degree_variance = s.mean_degree * s.mean_degree;
    assert!((optimal_split(&s, 0.3, 0.1).unwrap().eta_star - 0.5).abs() < 1e-15);
}

#[test]
fn window_below_lower_boundary() {
    let w = window_check_m(1000, 3, 2, 0.3, 1e-6, 1.0, 1.0).unwrap();
    assert!(!w.inside);
    assert!(w.ratio_low < 1.0);
}

proptest! {
    #[test]
    fn split_optimum_equals_binomial_rate(n in 30u32..400, p in 0.01f64..0.9, delta in 0.0f64..1.0) {
        let s = gen_ap(n, 3).unwrap().degree_stats();
        let a = optimal_split(&s, p, delta).unwrap().combined_exponent;
        let b = rate_p(&s, p, delta, &WindowOptions::default()).unwrap().exponent;
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
    }

    #[test]
    fn regime_label_is_the_minimum(n in 100u32..10_000_000, p in 1e-4f64..0.9, delta in 1e-3f64..1.0) {
        let r = w3_regime(n, p, delta).unwrap();
        let terms = [r.normal_term, r.poisson_term, r.localized_term];
        let idx = match r.label { Regime::Normal => 0, Regime::Poisson => 1, Regime::Localized => 2 };
        prop_assert!(terms.iter().all(|&t| terms[idx] <= t));
    }
}
