//! Result documents. CSV is derived from the JSON value so both formats
//! carry the same numbers.

use std::io::Write;

use anyhow::Result;
use serde_json::{Map, Value};

use crate::args::OutputFormat;

pub fn emit<W: Write>(doc: &Value, format: OutputFormat, mut out: W) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, doc)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => write_csv(doc, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn cell(v: &Value) -> String {
    let s = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// Leaves of `v` as `(dotted.path, value)` pairs in document order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        leaf => out.push((prefix.to_string(), leaf.clone())),
    }
}

/// A document with a `rows` array of objects becomes a table, one line per
/// row, with the remaining fields appended as constant columns. Anything
/// else becomes `key,value` lines.
fn write_csv<W: Write>(doc: &Value, out: &mut W) -> Result<()> {
    if let Some((rows, rest)) = split_rows(doc) {
        let mut meta = Vec::new();
        flatten("", &Value::Object(rest), &mut meta);
        let mut header: Vec<String> = Vec::new();
        let flat_rows: Vec<Vec<(String, Value)>> = rows
            .iter()
            .map(|r| {
                let mut cells = Vec::new();
                flatten("", r, &mut cells);
                cells
            })
            .collect();
        for (k, _) in flat_rows.iter().flatten() {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
        let width = header.len();
        header.extend(meta.iter().map(|(k, _)| k.clone()));
        writeln!(out, "{}", header.join(","))?;
        let tail: Vec<String> = meta.iter().map(|(_, v)| cell(v)).collect();
        for cells in flat_rows {
            let mut line: Vec<String> = header[..width]
                .iter()
                .map(|h| cells.iter().find(|(k, _)| k == h).map(|(_, v)| cell(v)).unwrap_or_default())
                .collect();
            line.extend(tail.iter().cloned());
            writeln!(out, "{}", line.join(","))?;
        }
    } else {
        writeln!(out, "key,value")?;
        let mut pairs = Vec::new();
        flatten("", doc, &mut pairs);
        for (k, v) in pairs {
            writeln!(out, "{},{}", cell(&Value::String(k)), cell(&v))?;
        }
    }
    Ok(())
}

fn split_rows(doc: &Value) -> Option<(Vec<Value>, Map<String, Value>)> {
    let map = doc.as_object()?;
    let rows = map.get("rows")?.as_array()?;
    if !rows.iter().all(Value::is_object) {
        return None;
    }
    let mut rest = map.clone();
    rest.remove("rows");
    Some((rows.clone(), rest))
}
