//! Deterministic JSON output helpers.
//!
//! Every number printed by the CLI is rounded to 12 significant digits
//! first, and +∞ is spelled as the string "inf", so identical inputs
//! produce identical stdout bytes.

use qchain::verify::fmt_g12;
use serde_json::{Map, Value};

/// A finite-or-infinite value in bits as a JSON value.
pub fn bits_json(x: f64) -> Value {
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.to_string());
    }
    num_json(x)
}

/// A finite number rounded to 12 significant digits.
pub fn num_json(x: f64) -> Value {
    let rounded: f64 = fmt_g12(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Recursively round all numbers in a JSON value to 12 significant digits.
pub fn round_numbers(value: Value) -> Value {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                if n.is_f64() {
                    return num_json(x);
                }
            }
            Value::Number(n)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_numbers).collect()),
        Value::Object(map) => {
            let mut out = Map::new();
            for (k, v) in map {
                out.insert(k, round_numbers(v));
            }
            Value::Object(out)
        }
        other => other,
    }
}

pub fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

/// Machine-readable error on stderr.
pub fn print_error(kind: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
}
