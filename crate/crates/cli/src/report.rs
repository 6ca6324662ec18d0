//! Structured reports: JSON documents, or flattened `key,value` CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Map, Value};

use crate::args::Format;

/// A named pass/fail outcome carried in every report.
pub struct Checks(Vec<(String, bool, String)>);

impl Checks {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push((name.into(), passed, detail.into()));
    }

    pub fn passed(&self) -> bool {
        self.0.iter().all(|c| c.1)
    }

    pub fn to_value(&self) -> Value {
        Value::Array(self.0.iter().map(|(n, p, d)| json!({ "name": n, "passed": p, "detail": d })).collect())
    }
}

/// Opens `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn emit(report: &Value, format: Format, out: &mut dyn Write) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["key", "value"])?;
            let mut rows = Vec::new();
            flatten("", report, &mut rows);
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Dotted keys; array elements are indexed, or keyed by their `name` field
/// when they have one.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&key(k), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let label = match item.get("name").and_then(Value::as_str) {
                    Some(name) => name.to_owned(),
                    None => i.to_string(),
                };
                flatten(&key(&label), item, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_owned(), s.clone())),
        Value::Null => rows.push((prefix.to_owned(), String::new())),
        other => rows.push((prefix.to_owned(), other.to_string())),
    }
}

/// JSON has no infinities; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_flattens_nested_documents() {
        let mut c = Checks::new();
        c.push("roots", true, "ok");
        let v = object(vec![
            ("n", json!(13)),
            ("lambdas", json!([-1.5, 2.0])),
            ("fit", json!({ "slope": 0.25 })),
            ("checks", c.to_value()),
        ]);
        let mut buf = Vec::new();
        emit(&v, Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "key,value\nn,13\nlambdas.0,-1.5\nlambdas.1,2.0\nfit.slope,0.25\nchecks.roots.name,roots\n\
             checks.roots.passed,true\nchecks.roots.detail,ok\n"
        );
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
    }
}
