//! Subcommand implementations. Each builds one JSON document for stdout.

use std::io::{self, BufWriter, Write};

use anyhow::{bail, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use hyperdev_core::montecarlo::{empirical_moments, predicted_normalizer, rate_ratio_sweep, StreamFactory};
use hyperdev_core::scalar::rational_string;
use hyperdev_core::process::{decompose, sample_prefix, CondMeanMode};
use hyperdev_core::rates::{
    optimal_split, rate_m, rate_m_progression, rate_m_sidon, rate_p, rate_p_progression, rate_p_sidon, w3_regime,
    WindowOptions,
};
use hyperdev_core::{
    exact_distribution_m, exact_distribution_p, io as hio, verify, Decomposition, Family, Scalar, SimulationConfig,
    SubsetModel, WeightedHypergraph,
};

use crate::args::*;
use crate::input::{load_source, parse_gen, parse_model, parse_rational, resolve_seed};
use crate::output::emit;
use crate::Outcome;

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Stats(a) => stats(a),
        Command::Decompose(a) => decompose_cmd(a),
        Command::Rate(a) => rate(a),
        Command::Regimes(a) => regimes(a),
        Command::Tail(a) => tail(a),
        Command::Moments(a) => moments(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Verify(a) => verify_cmd(a),
    }
}

fn print(doc: &Value, format: OutputFormat) -> Result<Outcome> {
    emit(doc, format, BufWriter::new(io::stdout().lock()))?;
    Ok(Outcome::Ok)
}

fn model_json(model: SubsetModel) -> Value {
    match model {
        SubsetModel::UniformM { m } => json!({"kind": "m", "m": m}),
        SubsetModel::BinomialP { p } => json!({"kind": "p", "p": p}),
    }
}

fn family_json(f: Option<Family>) -> Value {
    serde_json::to_value(f).unwrap_or(Value::Null)
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let seed = resolve_seed(&a.seed)?;
    let h = parse_gen(&a.gen, seed)?.into_graph()?;
    let mut out = BufWriter::new(io::stdout().lock());
    match a.graph_format {
        GraphFormat::Json => hio::write_json(&h, &mut out)?,
        GraphFormat::Text => hio::write_text(&h, &mut out)?,
    }
    out.flush()?;
    Ok(Outcome::Ok)
}

fn stats(a: StatsArgs) -> Result<Outcome> {
    let src = load_source(&a.input, 0)?;
    let stats = src.stats()?;
    let doc = json!({
        "family": family_json(src.family()),
        "edge_count": src.edge_count() as f64,
        "stats": stats,
    });
    print(&doc, a.format)
}

fn decompose_cmd(a: DecomposeArgs) -> Result<Outcome> {
    let seed = resolve_seed(&a.seed)?;
    let h = load_source(&a.input, seed)?.into_graph()?;
    let prefix = sample_prefix(h.n(), a.m, &mut StreamFactory::new(seed).stream(0))?;
    let members = prefix.order().to_vec();
    let doc = if a.exact {
        let d = decompose::<BigRational>(&h, &prefix, CondMeanMode::Incremental)?;
        let deviation: BigRational = h.deviation_m_exact(&members)?;
        decomposition_json(&d, Scalar::to_f64(&deviation), seed)
    } else {
        let d = decompose::<f64>(&h, &prefix, CondMeanMode::Incremental)?;
        decomposition_json(&d, h.deviation_m(&members)?, seed)
    };
    print(&doc, a.format)
}

fn decomposition_json<T: Scalar>(d: &Decomposition<T>, deviation: f64, seed: u64) -> Value {
    let f = |v: &T| v.to_f64();
    let opt = |v: &[T], i: usize| v.get(i).map(|x| x.to_f64());
    let mut rows = Vec::with_capacity(d.m * d.k);
    for i in 0..d.m {
        for l in 0..d.k {
            rows.push(json!({
                "i": i + 1,
                "l": l + 1,
                "A": f(&d.a[l][i]),
                "condmean": f(&d.cond_mean[l][i]),
                "X": f(&d.x[l][i]),
                "Y": f(&d.y[l][i]),
                "kappa": f(&d.kappa[i]),
                "kappa_prime": opt(&d.kappa_prime, i),
                "lambda_partial": opt(&d.lambda_partial, i),
                "qvar_partial": opt(&d.qvar_partial, i),
            }));
        }
    }
    json!({
        "rows": rows,
        "n": d.n,
        "k": d.k,
        "m": d.m,
        "seed": seed,
        "deviation": deviation,
        "reconstruction": d.reconstruction().ok().map(|r| r.to_f64()),
    })
}

fn rate(a: RateArgs) -> Result<Outcome> {
    let src = load_source(&a.input, 0)?;
    let stats = src.stats()?;
    let model = parse_model(&a.model)?;
    model.validate(stats.n)?;
    let window = WindowOptions {
        r: a.r,
        slack_low: a.slack_low,
        slack_high: a.slack_high,
    };
    let n = stats.n;
    let mut doc = match model {
        SubsetModel::UniformM { m } => {
            let t = m as f64 / n as f64;
            let dev = match (a.a, a.normalizers) {
                (Some(x), _) => x,
                (None, Some(z)) => z * rate_m(&stats, t, 0.0, &window)?.normalizer,
                (None, None) => bail!("the uniform model needs --a or --normalizers"),
            };
            let pred = rate_m(&stats, t, dev, &window)?;
            let asymptotic = match src.family() {
                Some(Family::Ap { k, .. }) => Some(rate_m_progression(n, k, t, dev)?),
                Some(Family::Sidon { .. }) => Some(rate_m_sidon(n, t, dev)?),
                None => None,
            };
            json!({"t": t, "prediction": pred, "asymptotic_exponent": asymptotic})
        }
        SubsetModel::BinomialP { p } => {
            let delta = match (a.delta, a.normalizers) {
                (Some(d), _) => d,
                (None, Some(z)) => {
                    let s = rate_p(&stats, p, 0.0, &window)?.normalizer;
                    z * s / (p.powi(stats.k as i32) * stats.total_weight)
                }
                (None, None) => bail!("the binomial model needs --delta or --normalizers"),
            };
            let pred = rate_p(&stats, p, delta, &window)?;
            let asymptotic = match src.family() {
                Some(Family::Ap { k, .. }) => Some(rate_p_progression(n, k, p, delta)?),
                Some(Family::Sidon { .. }) => Some(rate_p_sidon(n, p, delta)?),
                None => None,
            };
            let split = optimal_split(&stats, p, delta).ok();
            json!({"delta": delta, "prediction": pred, "asymptotic_exponent": asymptotic, "split": split})
        }
    };
    doc["model"] = model_json(model);
    doc["family"] = family_json(src.family());
    doc["stats"] = serde_json::to_value(&stats)?;
    print(&doc, a.format)
}

fn regimes(a: RegimesArgs) -> Result<Outcome> {
    let n = match (a.n, &a.input.file, &a.input.gen) {
        (Some(n), None, None) => n,
        (None, None, None) => bail!("give --n, a hypergraph file or --gen"),
        (Some(_), _, _) => bail!("--n conflicts with a hypergraph input"),
        _ => load_source(&a.input, 0)?.n(),
    };
    let r = w3_regime(n, a.p, a.delta)?;
    let doc = json!({"n": n, "p": a.p, "delta": a.delta, "regime": r});
    print(&doc, a.format)
}

fn sim_config(sim: &SimArgs, n: u32) -> Result<(SimulationConfig, u64)> {
    let seed = resolve_seed(&sim.seed)?;
    let model = parse_model(&sim.model)?;
    model.validate(n)?;
    let mut config = SimulationConfig::new(model, sim.samples)
        .with_seed(seed)
        .with_workers(workers(sim.workers)?);
    config.batch_size = sim.batch_size;
    Ok((config, seed))
}

/// Requested workers, `0` meaning every core, capped by `HYPERDEV_MAX_WORKERS`.
fn workers(requested: usize) -> Result<usize> {
    let all = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut w = if requested == 0 { all } else { requested };
    if let Ok(cap) = std::env::var("HYPERDEV_MAX_WORKERS") {
        let cap: usize = cap
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("HYPERDEV_MAX_WORKERS must be a positive integer, got `{cap}`"))?;
        if cap == 0 {
            bail!("HYPERDEV_MAX_WORKERS must be at least 1");
        }
        w = w.min(cap);
    }
    Ok(w)
}

fn graph_for_sim(input: &InputArgs, seed: &SeedArgs) -> Result<WeightedHypergraph> {
    load_source(input, resolve_seed(seed)?)?.into_graph()
}

fn tail(a: TailArgs) -> Result<Outcome> {
    let h = graph_for_sim(&a.input, &a.sim.seed)?;
    let (config, seed) = sim_config(&a.sim, h.n())?;
    let mut thresholds = a.thresholds.clone();
    if a.in_normalizers {
        let s = predicted_normalizer(&h.degree_stats(), config.model)
            .ok_or_else(|| anyhow::anyhow!("no predicted normalizer for this hypergraph and model"))?;
        thresholds.iter_mut().for_each(|x| *x *= s);
    }
    let config = config.with_thresholds(thresholds);
    log::info!("sampling {} subsets on {} workers", config.samples, config.workers);
    let table = rate_ratio_sweep(&h, &config)?;
    let mut doc = serde_json::to_value(&table)?;
    doc["seed"] = json!(seed);
    doc["model"] = model_json(config.model);
    print(&doc, a.format)
}

fn moments(a: MomentsArgs) -> Result<Outcome> {
    let h = graph_for_sim(&a.input, &a.sim.seed)?;
    let (config, seed) = sim_config(&a.sim, h.n())?;
    log::info!("sampling {} subsets on {} workers", config.samples, config.workers);
    let report = empirical_moments(&h, &config, a.ks)?;
    let mut doc = serde_json::to_value(&report)?;
    doc["seed"] = json!(seed);
    doc["model"] = model_json(config.model);
    print(&doc, a.format)
}

fn enumerate(a: EnumerateArgs) -> Result<Outcome> {
    let h = load_source(&a.input, 0)?.into_graph()?;
    let (kind, value) = a.model.split_once(':').unwrap_or(("", ""));
    let pmf = match kind.trim() {
        "m" => exact_distribution_m(&h, value.trim().parse()?, a.limit)?,
        "p" => exact_distribution_p(&h, &parse_rational(value)?, a.limit)?,
        _ => bail!("model `{}` must look like m:6 or p:1/2", a.model),
    };
    let doc = json!({
        "model": a.model,
        "n": h.n(),
        "mean": rational_string(&pmf.mean()),
        "variance": rational_string(&pmf.variance()),
        "pmf": pmf.to_json_map(),
    });
    print(&doc, a.format)
}

fn verify_cmd(a: VerifyArgs) -> Result<Outcome> {
    let seed = resolve_seed(&a.seed)?;
    // The suite deliberately probes dense prefixes; their advisories are noise here.
    let level = log::max_level();
    log::set_max_level(level.min(log::LevelFilter::Error));
    let report = verify::run_suite(a.quick, seed);
    log::set_max_level(level);
    let report = report?;
    for c in &report.checks {
        log::info!("{}: {} ({} cases)", c.name, if c.passed { "ok" } else { "FAILED" }, c.cases);
    }
    let passed = report.passed;
    print(&serde_json::to_value(&report)?, a.format)?;
    Ok(if passed { Outcome::Ok } else { Outcome::VerifyFailed })
}
