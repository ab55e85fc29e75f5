use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result. JSON is always available; CSV comes from explicit rows,
/// from the elements of a named array, or from flattening the whole record.
pub struct Output {
    json: Value,
    rows: Option<(Vec<String>, Vec<Vec<String>>)>,
    array: Option<&'static str>,
}

impl Output {
    pub fn new(json: Value) -> Self {
        Self {
            json,
            rows: None,
            array: None,
        }
    }

    pub fn with_rows(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.rows = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }

    pub fn with_array(mut self, key: &'static str) -> Self {
        self.array = Some(key);
        self
    }

    pub fn emit(self, format: Format, out: Option<&Path>) -> Result<()> {
        let mut sink: Box<dyn Write> = match out {
            Some(path) => Box::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            ),
            None => Box::new(io::stdout().lock()),
        };
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut sink, &self.json)?;
                writeln!(sink)?;
            }
            Format::Csv => {
                let (header, rows) = self.csv_table();
                let mut w = csv::Writer::from_writer(sink);
                w.write_record(&header)?;
                for row in rows {
                    w.write_record(&row)?;
                }
                w.flush()?;
                return Ok(());
            }
        }
        sink.flush()?;
        Ok(())
    }

    fn csv_table(self) -> (Vec<String>, Vec<Vec<String>>) {
        if let Some(rows) = self.rows {
            return rows;
        }
        let records: Vec<Map<String, Value>> = match self.array.and_then(|k| self.json.get(k)) {
            Some(Value::Array(items)) => items.iter().map(flatten).collect(),
            _ => vec![flatten(&self.json)],
        };
        let mut header: Vec<String> = Vec::new();
        for rec in &records {
            for k in rec.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let rows = records
            .iter()
            .map(|rec| {
                header
                    .iter()
                    .map(|k| rec.get(k).map(cell).unwrap_or_default())
                    .collect()
            })
            .collect();
        (header, rows)
    }
}

/// Nested objects become dotted keys; arrays stay as JSON text.
fn flatten(v: &Value) -> Map<String, Value> {
    fn go(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    go(&key, v, out);
                }
            }
            other => {
                out.insert(prefix.to_string(), other.clone());
            }
        }
    }
    let mut out = Map::new();
    match v {
        Value::Object(_) => go("", v, &mut out),
        other => {
            out.insert("value".into(), other.clone());
        }
    }
    out
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Raw Monte Carlo values, one per line, in draw order.
pub fn write_values(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["index", "value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_nests_with_dots() {
        let m = flatten(&json!({"a": 1, "b": {"c": "x", "d": [1, 2]}}));
        assert_eq!(m["a"], json!(1));
        assert_eq!(m["b.c"], json!("x"));
        assert_eq!(cell(&m["b.d"]), "[1,2]");
    }

    #[test]
    fn array_rows_take_union_of_keys() {
        let out = Output::new(json!({"rows": [{"a": 1}, {"a": 2, "b": 3}]})).with_array("rows");
        let (h, rows) = out.csv_table();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows[0], vec!["1", ""]);
        assert_eq!(rows[1], vec!["2", "3"]);
    }
}
