use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Decimal with 17 significant digits; non-finite values become `nan`/`inf`
/// and negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0.0000000000000000e0".to_string()
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string().to_lowercase()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => write!(out, "{u}").unwrap(),
            (None, Some(i), _) => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) if f.is_finite() => out.push_str(&fmt_f64(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                write!(out, "{pad}{}: ", Value::String(k.clone())).unwrap();
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON in which every float carries 17 significant digits. Integer
/// values stay integers; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut s = String::new();
    write_value(&mut s, &v, 0);
    s.push('\n');
    Ok(s)
}

/// A flat table with one documentation line per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let esc = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::new();
        let head: Vec<String> = self.columns.iter().map(|(c, _)| esc(c)).collect();
        writeln!(out, "{}", head.join(",")).unwrap();
        for r in &self.rows {
            let r: Vec<String> = r.iter().map(|c| esc(c)).collect();
            writeln!(out, "{}", r.join(",")).unwrap();
        }
        out
    }

    pub fn schema(&self, title: &str) -> String {
        let mut out = format!("{title}\n\n");
        let width = self.columns.iter().map(|(c, _)| c.len()).max().unwrap_or(0);
        for (c, d) in &self.columns {
            writeln!(out, "{c:<width$}  {d}").unwrap();
        }
        out
    }
}
