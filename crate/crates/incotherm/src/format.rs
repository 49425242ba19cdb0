//! Deterministic JSON and CSV rendering.
//!
//! Object keys are sorted, floats carry 17 significant digits in scientific
//! notation (`{:.16e}`, enough to round-trip any `f64`) and integers are
//! written as integers. Arrays that contain no objects stay on one line so
//! matrices read row by row.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{CliError, CliResult};

/// `{:.16e}` rendering used for every float in JSON and CSV output.
/// Negative zero prints as zero.
pub fn float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn number(n: &Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        float(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn has_object(v: &Value) -> bool {
    match v {
        Value::Object(_) => true,
        Value::Array(a) => a.iter().any(has_object),
        _ => false,
    }
}

fn write_inline(out: &mut String, v: &Value) {
    match v {
        Value::Array(a) => {
            out.push('[');
            for (i, e) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_inline(out, e);
            }
            out.push(']');
        }
        _ => write_value(out, v, 0),
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if !has_object(v) || a.is_empty() => write_inline(out, v),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, e) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, e, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String((*k).clone()));
                write_value(out, &m[k.as_str()], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Canonical text of a JSON value, newline terminated.
pub fn render_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let value = serde_json::to_value(v)
        .map_err(|e| CliError::validation(format!("cannot serialise output: {e}")))?;
    Ok(render_value(&value))
}

/// CSV with a header row; every cell is a float.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::validation(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r.iter().map(|&v| float(v))).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::validation(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::validation(format!("csv: {e}")))
}
