use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

pub const TOOL: &str = "tpfem";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tabular experiment output with the configuration that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub notes: Vec<String>,
    /// Set when a solve did not reach the tolerance.
    #[serde(skip)]
    pub failed: bool,
}

impl Report {
    pub fn new(config: &RunConfig, columns: &[&str]) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            failed: false,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
                out.push(b'\n');
                out
            }
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> Vec<u8> {
        let mut out = Vec::new();
        writeln!(out, "# {} {} {}", self.tool, self.version, self.config.command).unwrap();
        writeln!(out, "# config: {}", serde_json::to_string(&self.config).unwrap()).unwrap();
        for note in &self.notes {
            writeln!(out, "# note: {note}").unwrap();
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).unwrap();
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).unwrap();
        }
        w.into_inner().expect("in-memory writer")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "NA".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number for finite values, `null` otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn csv_and_json_carry_config() {
        let cfg = RunConfig::defaults(Command::Solve);
        let mut r = Report::new(&cfg, &["a", "b"]);
        r.push(vec![num(1.5), Value::Null]);
        r.notes.push("n".into());
        let csv = String::from_utf8(r.render(Format::Csv)).unwrap();
        assert!(csv.starts_with("# tpfem "));
        assert!(csv.contains("# config: {\"command\":\"solve\""));
        assert!(csv.ends_with("a,b\n1.5,NA\n"));
        let json: Value = serde_json::from_slice(&r.render(Format::Json)).unwrap();
        assert_eq!(json["version"], VERSION);
        assert_eq!(json["config"]["k"], 3);
        assert_eq!(json["rows"][0][1], Value::Null);
        assert_eq!(num(f64::NAN), Value::Null);
    }
}
