use hyperdev_core::oracle::{revolving_door_rank, revolving_door_unrank, DEFAULT_ENUMERATION_LIMIT};
use hyperdev_core::{exact_distribution_m, exact_distribution_p, exact_tail, gen_ap, gen_random, gen_sidon, Error, Side, Vertex};
use num_rational::BigRational;
use num_traits::{One, Zero};

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn subsets(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

#[test]
fn ap_five_three() {
    let pmf = exact_distribution_m(&gen_ap(5, 3).unwrap(), 3, DEFAULT_ENUMERATION_LIMIT).unwrap();
    assert_eq!(pmf.mass.len(), 2);
    assert_eq!(pmf.mass[&r(0, 1)], r(6, 10));
    assert_eq!(pmf.mass[&r(1, 1)], r(4, 10));
}

#[test]
fn full_subset_is_a_point_mass() {
    let h = gen_ap(9, 3).unwrap();
    let pmf = exact_distribution_m(&h, 9, DEFAULT_ENUMERATION_LIMIT).unwrap();
    assert_eq!(pmf.mass.len(), 1);
    assert_eq!(pmf.mass[&BigRational::from_integer((h.edge_count() as i64).into())], BigRational::one());
    let pmf = exact_distribution_p(&h, &BigRational::one(), DEFAULT_ENUMERATION_LIMIT).unwrap();
    assert_eq!(pmf.mass.len(), 1);
}

#[test]
fn sidon_four_at_half() {
    let pmf = exact_distribution_p(&gen_sidon(4).unwrap(), &r(1, 2), DEFAULT_ENUMERATION_LIMIT).unwrap();
    assert_eq!(pmf.mass[&r(1, 1)], r(1, 16));
    assert_eq!(pmf.total(), BigRational::one());
}

#[test]
fn variance_matches_independent_enumeration() {
    let h = gen_ap(12, 3).unwrap();
    let pmf = exact_distribution_m(&h, 6, DEFAULT_ENUMERATION_LIMIT).unwrap();
    assert_eq!(pmf.total(), BigRational::one());
    assert!(pmf.mass.values().all(|p| *p >= BigRational::zero()));
    let edges: Vec<Vec<Vertex>> = h.edges().map(|(e, _)| e.to_vec()).collect();
    let all = subsets(&(1..=12).collect::<Vec<_>>(), 6);
    let counts: Vec<i64> = all
        .iter()
        .map(|b| edges.iter().filter(|e| e.iter().all(|v| b.contains(v))).count() as i64)
        .collect();
    let n = counts.len() as i64;
    let sum: i64 = counts.iter().sum();
    let sum_sq: i64 = counts.iter().map(|c| c * c).sum();
    let mean = r(sum, n);
    let var = r(sum_sq, n) - &mean * &mean;
    assert_eq!(pmf.mean(), mean);
    assert_eq!(pmf.variance(), var);
}

#[test]
fn binomial_mean_by_direct_summation() {
    let h = gen_random(10, 3, 25, 4).unwrap();
    let n = 10u32;
    let m = 4;
    let p = r(m, n as i64);
    let pmf = exact_distribution_p(&h, &p, DEFAULT_ENUMERATION_LIMIT).unwrap();
    // E[N(B_p)] = Σ_j P(|B| = j) L(j).
    let mut expected = BigRational::zero();
    let q = BigRational::one() - &p;
    for j in 0..=n {
        let binom = subsets(&(1..=n).collect::<Vec<_>>(), j as usize).len() as i64;
        let weight = BigRational::from_integer(binom.into()) * num_traits::pow(p.clone(), j as usize) * num_traits::pow(q.clone(), (n - j) as usize);
        expected += weight * h.expected_count_exact::<BigRational>(j).unwrap();
    }
    assert_eq!(pmf.mean(), expected);
    assert_eq!(pmf.total(), BigRational::one());
}

#[test]
fn tails() {
    let pmf = exact_distribution_m(&gen_ap(5, 3).unwrap(), 3, DEFAULT_ENUMERATION_LIMIT).unwrap();
    assert_eq!(exact_tail(&pmf, &r(5, 1), Side::Upper), BigRational::zero());
    assert_eq!(exact_tail(&pmf, &r(-1, 1), Side::Lower), BigRational::zero());
    assert_eq!(exact_tail(&pmf, &r(1, 2), Side::Upper), r(2, 5));
    assert_eq!(exact_tail(&pmf, &r(0, 1), Side::Lower), r(3, 5));
}

#[test]
fn refuses_large_enumerations() {
    let h = gen_ap(40, 3).unwrap();
    match exact_distribution_m(&h, 20, 1_000_000) {
        Err(Error::ResourceLimit { required, limit }) => {
            assert_eq!(limit, 1_000_000);
            assert_eq!(required, 137_846_528_820);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn revolving_door_ranks_round_trip() {
    for n in 1..=9u32 {
        for t in 0..=n as usize {
            let all = subsets(&(0..n).collect::<Vec<_>>(), t);
            let mut seen = vec![false; all.len()];
            for s in &all {
                let rank = revolving_door_rank(s) as usize;
                assert!(!seen[rank]);
                seen[rank] = true;
                assert_eq!(&revolving_door_unrank(n, t, rank as u128), s);
            }
        }
    }
}
