//! Hypergraph file formats.
//!
//! JSON: `{"n": 5, "k": 3, "edges": [{"v": [1, 2, 3], "w": 1.0}, ...]}` with
//! `"w"` defaulting to 1.
//!
//! Text: one edge per line, `k` whitespace-separated 1-based vertex ids with
//! an optional trailing weight. Lines starting with `#` are comments; a
//! comment carrying `n=<N>` and `k=<K>` tokens acts as the header. Without a
//! header, `k` is the smallest token count seen and `n` the largest vertex id.

use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::{self, DeserializeSeed, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{HypergraphBuilder, Vertex, WeightedHypergraph};

/// A loaded hypergraph plus the number of duplicate edges merged on the way.
#[derive(Debug)]
pub struct Loaded {
    pub hypergraph: WeightedHypergraph,
    pub duplicates_merged: usize,
}

#[derive(Serialize)]
struct EdgeOut<'a> {
    v: &'a [Vertex],
    w: f64,
}

#[derive(Serialize)]
struct DocOut<'a> {
    n: u32,
    k: usize,
    edges: Vec<EdgeOut<'a>>,
}

/// Serialises to the JSON format. Weights round-trip exactly.
pub fn to_json(h: &WeightedHypergraph) -> Result<String> {
    let doc = DocOut {
        n: h.n(),
        k: h.k(),
        edges: h.edges().map(|(v, w)| EdgeOut { v, w }).collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn write_json<W: Write>(h: &WeightedHypergraph, mut out: W) -> Result<()> {
    out.write_all(to_json(h)?.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Parses the JSON format. Malformed edges are reported with the line and
/// column where parsing stopped.
pub fn from_json(text: &str) -> Result<Loaded> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed = DocSeed.deserialize(&mut de).and_then(|d| de.end().map(|_| d));
    match parsed {
        Ok(doc) => doc.finish(),
        Err(e) => Err(Error::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        }),
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(pos) => msg[..pos].to_string(),
        None => msg.to_string(),
    }
}

#[derive(Deserialize)]
struct EdgeIn {
    v: Vec<Vertex>,
    #[serde(default = "unit")]
    w: f64,
}

fn unit() -> f64 {
    1.0
}

/// Document under construction; edges are validated while streaming once
/// `n` and `k` are known, otherwise at the end.
enum Doc {
    Streamed(HypergraphBuilder),
    Deferred {
        n: Option<u32>,
        k: Option<usize>,
        edges: Vec<EdgeIn>,
    },
}

impl Doc {
    fn finish(self) -> Result<Loaded> {
        match self {
            Doc::Streamed(b) => Ok(Loaded {
                duplicates_merged: b.duplicates_merged(),
                hypergraph: b.build(),
            }),
            Doc::Deferred { n, k, edges } => {
                let n = n.ok_or_else(|| Error::InvalidInput("missing field `n`".into()))?;
                let k = k.ok_or_else(|| Error::InvalidInput("missing field `k`".into()))?;
                let mut b = HypergraphBuilder::new(n, k)?;
                for (i, e) in edges.iter().enumerate() {
                    b.add_edge(&e.v, e.w).map_err(|err| {
                        Error::InvalidInput(format!("edge #{i}: {}", inner_message(&err)))
                    })?;
                }
                Ok(Loaded {
                    duplicates_merged: b.duplicates_merged(),
                    hypergraph: b.build(),
                })
            }
        }
    }
}

fn inner_message(err: &Error) -> String {
    match err {
        Error::InvalidInput(m) => m.clone(),
        other => other.to_string(),
    }
}

struct DocSeed;

impl<'de> DeserializeSeed<'de> for DocSeed {
    type Value = Doc;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<Doc, D::Error> {
        d.deserialize_map(DocVisitor)
    }
}

struct DocVisitor;

impl<'de> Visitor<'de> for DocVisitor {
    type Value = Doc;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a hypergraph object with fields n, k, edges")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Doc, A::Error> {
        let mut n: Option<u32> = None;
        let mut k: Option<usize> = None;
        let mut streamed: Option<HypergraphBuilder> = None;
        let mut deferred: Option<Vec<EdgeIn>> = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "n" => n = Some(map.next_value()?),
                "k" => k = Some(map.next_value()?),
                "edges" => match (n, k) {
                    (Some(n), Some(k)) => {
                        let builder = HypergraphBuilder::new(n, k).map_err(de::Error::custom)?;
                        streamed = Some(map.next_value_seed(EdgesSeed(builder))?);
                    }
                    _ => deferred = Some(map.next_value()?),
                },
                _ => {
                    map.next_value::<de::IgnoredAny>()?;
                }
            }
        }
        Ok(match (streamed, deferred) {
            (Some(b), _) => Doc::Streamed(b),
            (None, edges) => Doc::Deferred {
                n,
                k,
                edges: edges.unwrap_or_default(),
            },
        })
    }
}

struct EdgesSeed(HypergraphBuilder);

impl<'de> DeserializeSeed<'de> for EdgesSeed {
    type Value = HypergraphBuilder;

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<Self::Value, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for EdgesSeed {
    type Value = HypergraphBuilder;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an array of edges")
    }

    fn visit_seq<A: SeqAccess<'de>>(mut self, mut seq: A) -> std::result::Result<Self::Value, A::Error> {
        let mut i = 0usize;
        // Validating inside the element keeps the reported position on the
        // offending edge rather than at the closing bracket.
        while seq
            .next_element_seed(EdgeSeed {
                builder: &mut self.0,
                index: i,
            })?
            .is_some()
        {
            i += 1;
        }
        Ok(self.0)
    }
}

struct EdgeSeed<'a> {
    builder: &'a mut HypergraphBuilder,
    index: usize,
}

impl<'de> DeserializeSeed<'de> for EdgeSeed<'_> {
    type Value = ();

    fn deserialize<D: Deserializer<'de>>(self, d: D) -> std::result::Result<(), D::Error> {
        d.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for EdgeSeed<'_> {
    type Value = ();

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an edge object {\"v\": [...], \"w\": weight}")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<(), A::Error> {
        let mut v: Option<Vec<Vertex>> = None;
        let mut w: Option<f64> = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "v" => v = Some(map.next_value()?),
                "w" => w = Some(map.next_value()?),
                _ => {
                    map.next_value::<de::IgnoredAny>()?;
                }
            }
        }
        let v = v.ok_or_else(|| de::Error::missing_field("v"))?;
        self.builder
            .add_edge(&v, w.unwrap_or(1.0))
            .map_err(|e| de::Error::custom(format!("edge #{}: {}", self.index, inner_message(&e))))
    }
}

/// Serialises to the text format, header first. Weights are written with
/// Rust's shortest round-trip representation.
pub fn write_text<W: Write>(h: &WeightedHypergraph, mut out: W) -> Result<()> {
    writeln!(out, "# n={} k={}", h.n(), h.k())?;
    for (edge, w) in h.edges() {
        let mut line = edge
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        if w != 1.0 {
            line.push(' ');
            line.push_str(&w.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

struct TextEdge {
    line: usize,
    tokens: Vec<(usize, String)>,
}

pub fn read_text<R: BufRead>(reader: R) -> Result<Loaded> {
    let mut n: Option<u32> = None;
    let mut k: Option<usize> = None;
    let mut rows: Vec<TextEdge> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim_start();
        if let Some(comment) = trimmed.strip_prefix('#') {
            for tok in comment.split_whitespace() {
                if let Some(v) = tok.strip_prefix("n=") {
                    n = Some(parse_header(v, lineno, &line, tok)?);
                } else if let Some(v) = tok.strip_prefix("k=") {
                    k = Some(parse_header(v, lineno, &line, tok)?);
                }
            }
            continue;
        }
        let tokens = tokens_with_columns(&line);
        if tokens.is_empty() {
            continue;
        }
        rows.push(TextEdge {
            line: lineno,
            tokens,
        });
    }
    let k = match k {
        Some(k) => k,
        None => rows.iter().map(|r| r.tokens.len()).min().unwrap_or(1),
    };
    let mut parsed: Vec<(usize, Vec<Vertex>, f64)> = Vec::with_capacity(rows.len());
    for row in &rows {
        let parse_err = |col: usize, message: String| Error::Parse {
            line: row.line,
            column: col,
            message,
        };
        if row.tokens.len() != k && row.tokens.len() != k + 1 {
            return Err(parse_err(
                row.tokens[0].0,
                format!("expected {k} vertices and an optional weight, found {} fields", row.tokens.len()),
            ));
        }
        let mut verts = Vec::with_capacity(k);
        for (col, tok) in &row.tokens[..k] {
            let v: Vertex = tok
                .parse()
                .map_err(|_| parse_err(*col, format!("`{tok}` is not a vertex id")))?;
            verts.push(v);
        }
        let w = match row.tokens.get(k) {
            Some((col, tok)) => tok
                .parse::<f64>()
                .map_err(|_| parse_err(*col, format!("`{tok}` is not a weight")))?,
            None => 1.0,
        };
        parsed.push((row.line, verts, w));
    }
    let n = match n {
        Some(n) => n,
        None => parsed
            .iter()
            .flat_map(|(_, v, _)| v.iter().copied())
            .max()
            .unwrap_or(1)
            .max(k as u32),
    };
    let mut builder = HypergraphBuilder::new(n, k)?;
    for (line, verts, w) in parsed {
        builder.add_edge(&verts, w).map_err(|e| Error::Parse {
            line,
            column: 1,
            message: inner_message(&e),
        })?;
    }
    Ok(Loaded {
        duplicates_merged: builder.duplicates_merged(),
        hypergraph: builder.build(),
    })
}

fn parse_header<T: std::str::FromStr>(v: &str, line: usize, full: &str, tok: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse {
        line,
        column: full.find(tok).map_or(1, |p| p + 1),
        message: format!("bad header value `{tok}`"),
    })
}

fn tokens_with_columns(line: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, line[s..i].to_string()));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, line[s..].to_string()));
    }
    out
}

/// File format, chosen from the extension when not given explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Text,
        }
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    match Format::from_path(path) {
        Format::Json => from_json(&fs::read_to_string(path)?),
        Format::Text => read_text(std::io::BufReader::new(fs::File::open(path)?)),
    }
}

pub fn save(h: &WeightedHypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::io::BufWriter::new(fs::File::create(path)?);
    match Format::from_path(path) {
        Format::Json => write_json(h, file),
        Format::Text => write_text(h, file),
    }
}
