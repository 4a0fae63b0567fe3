//! Deterministic text output: CSV tables and pretty JSON files.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// 17 significant digits, `inf`/`-inf`/`nan` spelled out.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Vector components joined by `;` so they fit in one CSV cell.
pub fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|&a| fmt_float(a)).collect::<Vec<_>>().join(";")
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 123456.789] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_vec(&[1.0, 2.0]), "1.0000000000000000e0;2.0000000000000000e0");
    }
}
