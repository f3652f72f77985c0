//! Deterministic text output: JSON with 17 significant digits and the scan
//! CSV `name,k,y,x,lhs,envelope,ratio`.

use std::io::Write;
use std::path::Path;

use holosup::report::{ScanReport, ScanRow};
use serde_json::Value;

use crate::CliError;

/// `x` with 17 significant digits, or `NaN` / `inf` / `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_u64() || n.is_i64() {
                out.push_str(&n.to_string());
            } else {
                // serde_json stores non-finite floats as null, so this is finite.
                out.push_str(&fmt17(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with sorted keys and 17-digit floats, newline-terminated.
pub fn json_text(v: &Value) -> String {
    let mut s = String::new();
    write_value(v, 0, &mut s);
    s.push('\n');
    s
}

pub fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("output types serialize")
}

fn write_rows<W: Write>(w: W, rows: &[ScanRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Usage(format!("writing CSV: {e}"));
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "k", "y", "x", "lhs", "envelope", "ratio"]).map_err(io)?;
    for r in rows {
        let nums = [r.k, r.y, r.x, r.lhs, r.envelope, r.ratio].map(fmt17);
        out.write_record(std::iter::once(r.name.clone()).chain(nums)).map_err(io)?;
    }
    out.flush().map_err(|e| CliError::Usage(format!("writing CSV: {e}")))
}

/// Writes the rows of `reports`, in order, to `path`.
pub fn write_csv(path: &Path, reports: &[&ScanReport]) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
    let rows: Vec<ScanRow> = reports.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    write_rows(std::io::BufWriter::new(file), &rows)
}

pub fn csv_text(rows: &[ScanRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("in-memory CSV");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt17(-0.1), "-1.0000000000000001e-1");
        assert_eq!(fmt17(f64::NAN), "NaN");
        for x in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_keeps_integers_and_widens_floats() {
        let v = json!({"b": 2, "a": [1.5, null, "x\"y"], "c": {}});
        let text = json_text(&v);
        assert_eq!(text, "{\n  \"a\": [\n    1.5000000000000000e0,\n    null,\n    \"x\\\"y\"\n  ],\n  \"b\": 2,\n  \"c\": {}\n}\n");
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"][0], json!(1.5));
    }

    #[test]
    fn csv_header_and_rows() {
        let row = ScanRow { name: "r".into(), k: 12.0, y: 1.0, x: 0.0, lhs: 2.0, envelope: 4.0, ratio: 0.5 };
        let text = csv_text(&[row]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("name,k,y,x,lhs,envelope,ratio"));
        assert_eq!(
            lines.next(),
            Some("r,1.2000000000000000e1,1.0000000000000000e0,0.0000000000000000e0,2.0000000000000000e0,4.0000000000000000e0,5.0000000000000000e-1")
        );
    }
}
