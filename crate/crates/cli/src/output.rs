//! Row formatting: JSON lines or CSV, numbers at a fixed significant-figure
//! count so nothing is silently rounded.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use levyint_core::XReal;
use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Printed form of a working-precision real with `sig` significant digits.
pub fn real(x: &XReal, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(sig))
}

/// Error estimates and other diagnostics: three significant digits.
pub fn small(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_finite() {
        format!("{x:.2e}")
    } else {
        // JSON has no infinities; keep the field textual
        format!("{x}")
    }
}

// String fields that parse as JSON numbers are emitted as numbers, with
// every printed digit kept.
fn numeric(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, numeric(v))).collect::<Map<_, _>>()),
        Value::String(s) => match s.parse::<Number>() {
            Ok(n) => Value::Number(n),
            Err(_) => Value::String(s),
        },
        other => other,
    }
}

/// Writes rows in input order.
pub fn emit<T: Serialize>(rows: &[T], format: Format) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            for r in rows {
                let v = numeric(serde_json::to_value(r)?);
                writeln!(out, "{}", serde_json::to_string(&v)?)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use levyint_core::PrecisionCtx;

    #[test]
    fn reals_keep_their_digits() {
        let c = PrecisionCtx::new(30);
        let third = c.real(1) / 3u32;
        let s = real(&third, 25);
        assert!(s.starts_with("3.333333333333333333333333"));
        let n: Number = s.parse().unwrap();
        assert_eq!(n.to_string(), s);
        assert_eq!(real(&c.real(0), 25), "0");
    }

    #[test]
    fn numeric_strings_become_numbers() {
        #[derive(Serialize)]
        struct R {
            a: String,
            m: String,
        }
        let v = numeric(serde_json::to_value(R { a: "1.50e-3".into(), m: "quad".into() }).unwrap());
        assert!(v["a"].is_number());
        assert_eq!(v["m"], "quad");
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":1.50e-3,"m":"quad"}"#);
    }
}
