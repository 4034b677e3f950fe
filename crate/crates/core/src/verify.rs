//! Self-check suite of exact identities, run by the `verify` command.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::generators::{gen_ap, gen_random, gen_sidon};
use crate::hypergraph::{Vertex, VertexSet, WeightedHypergraph};
use crate::montecarlo::{count_fast, Bitset};
use crate::oracle::{exact_distribution_m, DEFAULT_ENUMERATION_LIMIT};
use crate::process::{
    conditional_means, decompose, kappa_prime, kappa_prime_expansion, quadratic_variation,
    quadratic_variation_from_scratch, sample_prefix, CondMeanMode, OrderedPrefix,
};
use crate::rates::{gamma_k_exact, progression_rate_constant, theta_k_exact};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, cases: usize, failures: Vec<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: failures.is_empty(),
        cases,
        detail: failures.into_iter().take(3).collect::<Vec<_>>().join("; "),
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> Result<(WeightedHypergraph, OrderedPrefix)> {
    let n = rng.random_range(8..=20u32);
    let k = rng.random_range(3..=4usize);
    let edges = rng.random_range(1..=3 * n as usize);
    let h = gen_random(n, k, edges, rng.random())?;
    let m = rng.random_range(1..=n - k as u32);
    let prefix = sample_prefix(n, m, rng)?;
    Ok((h, prefix))
}

/// Runs every check. `quick` shrinks case counts for a fast smoke test.
pub fn run_suite(quick: bool, seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reps = if quick { 20 } else { 200 };
    let mut checks = Vec::new();

    let (mut exact_fail, mut float_fail, mut mode_fail, mut qv_fail) = (vec![], vec![], vec![], vec![]);
    for case in 0..reps {
        let (h, prefix) = random_instance(&mut rng)?;
        let members = prefix.order().to_vec();
        let d: BigRational = h.deviation_m_exact(&members)?;
        let exact = decompose::<BigRational>(&h, &prefix, CondMeanMode::Incremental)?;
        if exact.reconstruction()? != d {
            exact_fail.push(format!("case {case}"));
        }
        let float = decompose::<f64>(&h, &prefix, CondMeanMode::Incremental)?.reconstruction()?;
        if (float - d.to_f64()).abs() > 1e-9 * d.to_f64().abs().max(1.0) {
            float_fail.push(format!("case {case}: {float} vs {}", d.to_f64()));
        }
        if exact.cond_mean != conditional_means::<BigRational>(&h, &prefix, CondMeanMode::Naive)? {
            mode_fail.push(format!("case {case}"));
        }
        let v = quadratic_variation(&h, &prefix)?;
        let w = quadratic_variation_from_scratch(&h, &prefix)?;
        let (a, b) = (v.last().copied().unwrap_or(0.0), w.last().copied().unwrap_or(0.0));
        if (a - b).abs() > 1e-10 * b.abs().max(1.0) {
            qv_fail.push(format!("case {case}: {a} vs {b}"));
        }
    }
    checks.push(check("martingale identity (exact)", reps, exact_fail));
    checks.push(check("martingale identity (float, 1e-9 relative)", reps, float_fail));
    checks.push(check("incremental and naive conditional means agree", reps, mode_fail));
    checks.push(check("quadratic variation running sums", reps, qv_fail));

    let mut kappa_fail = vec![];
    let mut kappa_cases = 0;
    for n in [10u32, 37, 100] {
        for k in 1..=6usize {
            for m in 1..n as usize {
                for i in 1..=m {
                    let a = kappa_prime(i, m, n, k)?;
                    let b = kappa_prime_expansion(i, m, n, k)?;
                    kappa_cases += 1;
                    if (a - b).abs() > 1e-12 {
                        kappa_fail.push(format!("N={n} k={k} m={m} i={i}"));
                    }
                }
            }
        }
    }
    checks.push(check("kappa' binomial expansion", kappa_cases, kappa_fail));

    let mut oracle_fail = vec![];
    let ap5 = gen_ap(5, 3)?;
    let pmf = exact_distribution_m(&ap5, 3, DEFAULT_ENUMERATION_LIMIT)?;
    let expected: Vec<(BigRational, BigRational)> = vec![
        (BigRational::from_int(0), BigRational::new(3.into(), 5.into())),
        (BigRational::from_int(1), BigRational::new(2.into(), 5.into())),
    ];
    if pmf.mass.into_iter().collect::<Vec<_>>() != expected {
        oracle_fail.push("gen_ap(5,3), m = 3".into());
    }
    let (n, m) = if quick { (10, 5) } else { (12, 6) };
    let h = gen_ap(n, 3)?;
    let pmf = exact_distribution_m(&h, m, DEFAULT_ENUMERATION_LIMIT)?;
    if pmf.mean() != h.expected_count_exact::<BigRational>(m)? {
        oracle_fail.push(format!("mean on gen_ap({n},3), m = {m}"));
    }
    checks.push(check("enumeration oracle", 2, oracle_fail));

    let mut fast_fail = vec![];
    let cases = if quick { 50 } else { 500 };
    for (label, h) in [("ap", gen_ap(97, 3)?), ("sidon", gen_sidon(41)?)] {
        for _ in 0..cases {
            let size = rng.random_range(0..=h.n() as usize);
            let members: Vec<Vertex> = rand::seq::index::sample(&mut rng, h.n() as usize, size)
                .into_iter()
                .map(|v| v as Vertex + 1)
                .collect();
            let generic = h.count_in(&VertexSet::new(h.n(), &members)?);
            if count_fast(&h, &Bitset::from_members(h.n(), &members))? != generic {
                fast_fail.push(format!("{label}: {members:?}"));
            }
        }
    }
    checks.push(check("specialised counters", 2 * cases, fast_fail));

    let mut const_fail = vec![];
    if theta_k_exact(3)? != BigRational::new(1.into(), 48.into()) {
        const_fail.push("theta_3".into());
    }
    if gamma_k_exact(3)? != BigRational::new(28.into(), 3.into()) {
        const_fail.push("gamma_3".into());
    }
    if progression_rate_constant(3)? != BigRational::new(3.into(), 56.into()) {
        const_fail.push("1/(2 gamma_3)".into());
    }
    checks.push(check("progression constants", 3, const_fail));

    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
