//! Table documents rendered as CSV or JSON.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every f64. Non-finite reals become `null` in JSON; absent
//! cells are empty in CSV and `null` in JSON.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Bool(bool),
    Text(String),
    Absent,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Absent => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) if v.is_finite() => {
                Value::Number(Number::from_str(&format_real(*v)).expect("valid JSON number"))
            }
            Cell::Real(_) | Cell::Absent => Value::Null,
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Absent, Cell::Real)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A self-describing result: the command, its echoed configuration and
/// a table of rows with fixed column order.
#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    pub config: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = format!("# command={}\n", self.command);
        for (key, value) in &self.config {
            out.push_str(&format!("# {key}={}\n", value.to_csv()));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(Cell::to_csv))
                .expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("utf-8 output"));
        out
    }

    fn render_json(&self) -> String {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_json()))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.into()));
        doc.insert("config".into(), Value::Object(config));
        doc.insert("columns".into(), self.columns.iter().map(|c| Value::from(*c)).collect());
        doc.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        Document {
            command: "demo",
            config: vec![("seed", Cell::Int(7)), ("eps", Cell::Real(0.25))],
            columns: vec!["n", "value", "missing", "ok"],
            rows: vec![vec![
                Cell::Int(3),
                Cell::Real(0.1),
                Cell::Absent,
                Cell::Bool(true),
            ]],
        }
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            sample().render(Format::Csv),
            "# command=demo\n# seed=7\n# eps=2.5000000000000000e-1\nn,value,missing,ok\n3,1.0000000000000001e-1,,true\n"
        );
    }

    #[test]
    fn json_layout() {
        let text = sample().render(Format::Json);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "demo");
        assert_eq!(v["rows"][0]["missing"], Value::Null);
        assert!(text.contains("\"value\": 1.0000000000000001e-1"));
        let keys: Vec<_> = v["rows"][0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["n", "value", "missing", "ok"]);
    }

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_real(f64::INFINITY), "inf");
    }
}
