//! Deterministic report rendering.
//!
//! Object keys come out sorted (serde_json's map is ordered) and every float is
//! written in scientific notation with 17 significant digits, so identical
//! reports are byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// A finished command: the report body and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFile {
    pub body: Value,
    pub exit_code: i32,
}

fn number(out: &mut String, n: &serde_json::Number) {
    if let Some(i) = n.as_i64() {
        write!(out, "{i}").unwrap();
    } else if let Some(u) = n.as_u64() {
        write!(out, "{u}").unwrap();
    } else {
        let x = n.as_f64().unwrap_or(f64::NAN);
        if x.is_finite() {
            write!(out, "{x:.16e}").unwrap();
        } else {
            out.push_str("null");
        }
    }
}

fn render_into(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialise")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            // short numeric arrays (complex pairs) stay on one line
            if items.len() <= 2 && items.iter().all(Value::is_number) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    render_into(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                render_into(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(k).expect("keys serialise"));
                out.push_str(": ");
                render_into(out, x, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

pub fn render_report(body: &Value) -> String {
    let mut out = String::new();
    render_into(&mut out, body, 0);
    out.push('\n');
    out
}

pub fn write_report(report: &ReportFile, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, render_report(&report.body)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = render_report(&json!({"b": 0.1, "a": [1.0, -2.5e-300], "n": 3, "z": f64::NAN}));
        assert!(
            s.contains("\"a\": [1.0000000000000000e0, -2.5000000000000000e-300]"),
            "{s}"
        );
        assert!(s.contains("\"b\": 1.0000000000000001e-1"));
        assert!(s.contains("\"n\": 3"));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }
}
