//! Tabular reports rendered as CSV or JSON with a provenance header.

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::Format;

pub const TOOL: &str = "oqs";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A table of rows plus free-form metadata.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'a str,
    version: &'a str,
    config_sha256: &'a str,
    command: &'a str,
    meta: &'a Map<String, Value>,
    columns: &'a [String],
    rows: &'a [Vec<Value>],
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.meta.insert(key.to_string(), v);
    }

    pub fn render(&self, format: Format, config_sha256: &str) -> String {
        match format {
            Format::Json => {
                let doc = JsonReport {
                    tool: TOOL,
                    version: VERSION,
                    config_sha256,
                    command: &self.command,
                    meta: &self.meta,
                    columns: &self.columns,
                    rows: &self.rows,
                };
                let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# tool = {TOOL} {VERSION}\n# config_sha256 = {config_sha256}\n# command = {}\n", self.command);
                for (k, v) in &self.meta {
                    s.push_str(&format!("# {k} = {v}\n"));
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        Value::Null => "nan".to_string(),
        other => other.to_string(),
    }
}

/// JSON number, or null when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
