//! Rendering of reports as JSON, CSV or `key: value` text.

use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A table for CSV output; the first row is the header.
pub type Table = Vec<Vec<String>>;

/// What a subcommand produces: the JSON report plus optional custom
/// renderings that replace the generic flattening.
pub struct Rendered {
    pub json: Value,
    pub table: Option<Table>,
    pub text: Option<String>,
}

impl Rendered {
    pub fn new(json: Value) -> Self {
        Rendered {
            json,
            table: None,
            text: None,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> Result<(), CliError> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let table = match &self.table {
                    Some(t) => t.clone(),
                    None => key_value_table(&self.json),
                };
                let mut writer = csv::Writer::from_writer(out);
                for row in table {
                    writer.write_record(row)?;
                }
                writer.flush()?;
            }
            Format::Text => match &self.text {
                Some(text) => out.write_all(text.as_bytes())?,
                None => {
                    for (key, value) in flatten(&self.json) {
                        writeln!(out, "{key}: {value}")?;
                    }
                }
            },
        }
        Ok(())
    }
}

fn key_value_table(json: &Value) -> Table {
    let mut table = vec![vec!["key".to_string(), "value".to_string()]];
    table.extend(flatten(json).into_iter().map(|(k, v)| vec![k, v]));
    table
}

/// `{"num", "den", "float"}` objects, the serialized form of exact rationals.
fn as_ratio(value: &Value) -> Option<String> {
    let obj = value.as_object()?;
    if obj.len() != 3 {
        return None;
    }
    let num = obj.get("num")?.as_str()?;
    let den = obj.get("den")?.as_str()?;
    obj.get("float")?;
    Some(if den == "1" {
        num.to_string()
    } else {
        format!("{num}/{den}")
    })
}

/// Scalar rendering of a leaf; `None` for containers that need descent.
pub fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|v| scalar(v).is_some()) => Some(
            items
                .iter()
                .filter_map(scalar)
                .collect::<Vec<_>>()
                .join(" "),
        ),
        Value::Array(_) => None,
        Value::Object(_) => as_ratio(value),
    }
}

/// Dotted `path: value` pairs in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

fn walk(value: &Value, path: String, out: &mut Vec<(String, String)>) {
    if let Some(s) = scalar(value) {
        out.push((path, s));
        return;
    }
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match value {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                walk(item, join(&i.to_string()), out);
            }
        }
        Value::Object(map) => {
            for (key, item) in map {
                walk(item, join(key), out);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens_ratios_and_nesting() {
        let v = json!({
            "mu": {"num": "1", "den": "2", "float": 0.5},
            "whole": {"num": "3", "den": "1", "float": 3.0},
            "list": [1, 2],
            "nested": [{"a": true}],
        });
        let flat = flatten(&v);
        assert!(flat.contains(&("mu".into(), "1/2".into())));
        assert!(flat.contains(&("whole".into(), "3".into())));
        assert!(flat.contains(&("list".into(), "1 2".into())));
        assert!(flat.contains(&("nested.0.a".into(), "true".into())));
    }
}
