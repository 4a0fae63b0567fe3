//! Text format for grid functions:
//!
//! ```text
//! gridfn v1
//! dim 2
//! axis 0 -1.0000000000000000e0 1.0000000000000000e0 21
//! axis 1 -3.0000000000000000e0 3.0000000000000000e0 21
//! <one value per line, row-major, `inf` for +∞>
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! finite `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::grid::{GridFn, GridSpec};
use crate::error::{Error, Result};

/// Format a float with 17 significant digits (`inf` for +∞).
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_gridfn(f: &GridFn) -> String {
    let spec = f.spec();
    let mut out = String::with_capacity(32 * (spec.len() + spec.dim() + 2));
    out.push_str("gridfn v1\n");
    let _ = writeln!(out, "dim {}", spec.dim());
    for a in 0..spec.dim() {
        let _ = writeln!(
            out,
            "axis {a} {} {} {}",
            fmt_f64(spec.lower()[a]),
            fmt_f64(spec.upper()[a]),
            spec.counts()[a]
        );
    }
    for &v in f.values() {
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "inf" | "+inf" => Ok(f64::INFINITY),
        _ => {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(line, format!("not a number: `{tok}`")))?;
            if v.is_nan() {
                Err(parse_err(line, "NaN is not allowed"))
            } else if v == f64::NEG_INFINITY {
                Err(parse_err(line, "-inf is not allowed"))
            } else if v.is_infinite() {
                Ok(f64::INFINITY)
            } else {
                Ok(v)
            }
        }
    }
}

pub fn read_gridfn(text: &str) -> Result<GridFn> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header != "gridfn v1" {
        return Err(parse_err(ln, format!("expected `gridfn v1`, found `{header}`")));
    }
    let (ln, dim_line) = lines.next().ok_or_else(|| parse_err(2, "missing `dim` line"))?;
    let dim: usize = match dim_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dim", d] => d
            .parse()
            .map_err(|_| parse_err(ln, format!("bad dimension `{d}`")))?,
        _ => return Err(parse_err(ln, format!("expected `dim d`, found `{dim_line}`"))),
    };
    if dim == 0 {
        return Err(parse_err(ln, "dimension must be positive"));
    }
    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    let mut counts = Vec::with_capacity(dim);
    for a in 0..dim {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(3 + a, format!("missing axis {a}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 5 || toks[0] != "axis" {
            return Err(parse_err(ln, format!("expected `axis i lower upper count`, found `{l}`")));
        }
        if toks[1].parse::<usize>().ok() != Some(a) {
            return Err(parse_err(ln, format!("expected axis index {a}")));
        }
        let lo: f64 = toks[2]
            .parse()
            .map_err(|_| parse_err(ln, format!("bad lower bound `{}`", toks[2])))?;
        let hi: f64 = toks[3]
            .parse()
            .map_err(|_| parse_err(ln, format!("bad upper bound `{}`", toks[3])))?;
        let c: usize = toks[4]
            .parse()
            .map_err(|_| parse_err(ln, format!("bad count `{}`", toks[4])))?;
        lower.push(lo);
        upper.push(hi);
        counts.push(c);
    }
    let spec = GridSpec::new(lower, upper, counts)?;
    let expected = spec.len();
    let mut values = Vec::with_capacity(expected);
    for (ln, l) in lines {
        if values.len() == expected {
            return Err(parse_err(ln, format!("more than {expected} values")));
        }
        values.push(parse_value(l, ln)?);
    }
    if values.len() != expected {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    GridFn::new(spec, values)
}

pub fn load_gridfn(path: &Path) -> Result<GridFn> {
    read_gridfn(&std::fs::read_to_string(path)?)
}

pub fn save_gridfn(f: &GridFn, path: &Path) -> Result<()> {
    std::fs::write(path, write_gridfn(f))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let spec = GridSpec::new(vec![-1.0, 0.1], vec![1.0, 0.7], vec![3, 4]).unwrap();
        let f = GridFn::from_fn(spec, |p| {
            if p[0] > 0.5 {
                f64::INFINITY
            } else {
                (p[0] * 3.7).exp() / 3.0 + p[1]
            }
        })
        .unwrap();
        let back = read_gridfn(&write_gridfn(&f)).unwrap();
        assert_eq!(back.spec(), f.spec());
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(read_gridfn("").is_err());
        assert!(read_gridfn("gridfn v2\ndim 1\n").is_err());
        assert!(read_gridfn("gridfn v1\ndim 1\naxis 0 0 1 2\n1\n").is_err());
        assert!(read_gridfn("gridfn v1\ndim 1\naxis 0 0 1 2\n1\n2\n3\n").is_err());
        assert!(read_gridfn("gridfn v1\ndim 1\naxis 0 0 1 2\n1\n-inf\n").is_err());
        assert!(read_gridfn("gridfn v1\ndim 1\naxis 0 0 1 2\ninf\ninf\n").is_err());
        assert!(read_gridfn("gridfn v1\ndim 1\naxis 0 1 0 2\n1\n2\n").is_err());
        assert!(read_gridfn("gridfn v1\ndim 1\naxis 0 0 1 2\n1\nabc\n").is_err());
    }

    #[test]
    fn accepts_infinity_entries() {
        let f = read_gridfn("gridfn v1\ndim 1\naxis 0 0 1 2\n1.5\ninf\n").unwrap();
        assert_eq!(f.values(), &[1.5, f64::INFINITY]);
    }
}
