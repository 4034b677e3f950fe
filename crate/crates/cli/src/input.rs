//! Hypergraph sources and model strings.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hyperdev_core::{io, scalar};
use hyperdev_core::montecarlo::DEFAULT_SEED;
use hyperdev_core::{gen_random, DegreeStats, Family, SubsetModel, WeightedHypergraph};
use num_rational::BigRational;

use crate::args::{InputArgs, SeedArgs};

/// Either a structured family, kept symbolic until edges are needed, or a
/// concrete hypergraph.
pub enum Source {
    Family(Family),
    Graph(WeightedHypergraph),
}

impl Source {
    pub fn n(&self) -> u32 {
        match self {
            Source::Family(f) => f.n(),
            Source::Graph(h) => h.n(),
        }
    }

    pub fn family(&self) -> Option<Family> {
        match self {
            Source::Family(f) => Some(*f),
            Source::Graph(h) => Family::detect(h),
        }
    }

    /// Degree statistics; families use closed-form degrees.
    pub fn stats(&self) -> Result<DegreeStats> {
        Ok(match self {
            Source::Family(f) => f.degree_stats()?,
            Source::Graph(h) => h.degree_stats(),
        })
    }

    pub fn edge_count(&self) -> u128 {
        match self {
            Source::Family(f) => f.edge_count(),
            Source::Graph(h) => h.edge_count() as u128,
        }
    }

    pub fn into_graph(self) -> Result<WeightedHypergraph> {
        match self {
            Source::Family(f) => {
                log::info!("generating {} edges", f.edge_count());
                Ok(f.generate()?)
            }
            Source::Graph(h) => Ok(h),
        }
    }
}

fn numbers<T: std::str::FromStr>(body: &str, count: usize, spec: &str) -> Result<Vec<T>> {
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    if parts.len() != count {
        bail!("`{spec}`: expected {count} comma-separated numbers");
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| anyhow!("`{spec}`: cannot parse `{p}`")))
        .collect()
}

/// `ap:N,k`, `sidon:N` or `random:N,k,E`.
pub fn parse_gen(spec: &str, seed: u64) -> Result<Source> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("generator `{spec}` must look like ap:N,k, sidon:N or random:N,k,E"))?;
    match kind.trim() {
        "ap" => {
            let v = numbers::<u64>(body, 2, spec)?;
            let n = u32::try_from(v[0]).context("N too large")?;
            let family = Family::Ap { n, k: v[1] as usize };
            family.degree_stats()?;
            Ok(Source::Family(family))
        }
        "sidon" => {
            let v = numbers::<u32>(body, 1, spec)?;
            let family = Family::Sidon { n: v[0] };
            family.degree_stats()?;
            Ok(Source::Family(family))
        }
        "random" => {
            let v = numbers::<u64>(body, 3, spec)?;
            let n = u32::try_from(v[0]).context("N too large")?;
            Ok(Source::Graph(gen_random(n, v[1] as usize, v[2] as usize, seed)?))
        }
        other => bail!("unknown generator `{other}` (expected ap, sidon or random)"),
    }
}

pub fn load_source(input: &InputArgs, seed: u64) -> Result<Source> {
    match (&input.file, &input.gen) {
        (_, Some(spec)) => parse_gen(spec, seed),
        (Some(path), None) => load_file(path),
        (None, None) => bail!("give a hypergraph file or --gen"),
    }
}

fn load_file(path: &Path) -> Result<Source> {
    let loaded = io::load(path).with_context(|| format!("reading {}", path.display()))?;
    if loaded.duplicates_merged > 0 {
        log::warn!("merged {} duplicate edges", loaded.duplicates_merged);
    }
    Ok(Source::Graph(loaded.hypergraph))
}

pub fn resolve_seed(seed: &SeedArgs) -> Result<u64> {
    match seed.seed.as_deref() {
        None => Ok(DEFAULT_SEED),
        Some("random") => {
            let s = rand::random::<u64>();
            log::info!("using random seed {s}");
            Ok(s)
        }
        Some(s) => s.trim().parse().map_err(|_| anyhow!("seed `{s}` is neither an integer nor `random`")),
    }
}

/// `m:<size>` or `p:<probability>`.
pub fn parse_model(spec: &str) -> Result<SubsetModel> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("model `{spec}` must look like m:300 or p:0.3"))?;
    match kind.trim() {
        "m" => Ok(SubsetModel::UniformM {
            m: value.trim().parse().map_err(|_| anyhow!("cannot parse subset size `{value}`"))?,
        }),
        "p" => {
            let p = parse_rational(value)?;
            Ok(SubsetModel::BinomialP {
                p: scalar::Scalar::to_f64(&p),
            })
        }
        other => bail!("unknown model `{other}` (expected m or p)"),
    }
}

/// Exact value of `a/b` or a decimal literal such as `0.3`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    scalar::parse_rational(text).ok_or_else(|| anyhow!("cannot parse `{}` as a fraction or decimal", text.trim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("0.3").unwrap(), BigRational::new(3.into(), 10.into()));
        assert_eq!(parse_rational("2").unwrap(), BigRational::from_integer(2.into()));
        assert!(parse_rational("0.x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn models() {
        assert_eq!(parse_model("m:300").unwrap(), SubsetModel::UniformM { m: 300 });
        assert_eq!(parse_model("p:1/4").unwrap(), SubsetModel::BinomialP { p: 0.25 });
        assert!(parse_model("q:3").is_err());
    }

    #[test]
    fn generators() {
        assert!(matches!(parse_gen("ap:5,3", 0).unwrap(), Source::Family(Family::Ap { n: 5, k: 3 })));
        assert!(matches!(parse_gen("sidon:9", 0).unwrap(), Source::Family(Family::Sidon { n: 9 })));
        assert_eq!(parse_gen("random:10,3,7", 1).unwrap().edge_count(), 7);
        assert!(parse_gen("ap:5", 0).is_err());
        assert!(parse_gen("cube:5", 0).is_err());
    }
}
