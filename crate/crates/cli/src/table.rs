//! Tabular output in CSV and JSON with identical numeric content.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Map, Value};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows grouped into blocks; CSV separates blocks with a blank line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    /// Run parameters echoed into JSON output.
    #[serde(skip)]
    pub meta: Vec<(&'static str, Value)>,
    pub blocks: Vec<Vec<Vec<f64>>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            columns,
            meta: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &'static str, value: Value) -> Self {
        self.meta.push((key, value));
        self
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            for row in block {
                let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), json!(self.command));
        for (k, v) in &self.meta {
            obj.insert((*k).into(), v.clone());
        }
        obj.insert("columns".into(), json!(self.columns));
        obj.insert("blocks".into(), json!(self.blocks));
        Value::Object(obj)
    }

    pub fn write_json<W: Write>(&self, out: &mut W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
        writeln!(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("density", vec!["a [x]", "b [y]"]);
        t.blocks.push(vec![vec![0.1, 1.0 / 3.0], vec![2.0, -1e-300]]);
        t.blocks.push(vec![vec![5.0, 6.0]]);
        t
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -1e-300, 6.02e23, std::f64::consts::PI] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a [x],b [y]");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[3], "");
    }

    #[test]
    fn json_matches_csv_values() {
        let t = sample();
        let v = t.to_json();
        let blocks = v["blocks"].as_array().unwrap();
        assert_eq!(blocks[0][0][1].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(blocks[1][0][0].as_f64().unwrap(), 5.0);
        assert_eq!(v["command"], "density");
    }
}
