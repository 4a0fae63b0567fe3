use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::catalog::{builtin_catalog, CatalogEntry};
use super::report::{csv_table, fmt_float, fmt_vec, write_json, write_text};
use super::{Axis, Format, RunConfig, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use crate::convex::GridSpec;
use crate::duality::DualityMap;
use crate::error::{Error, Result};
use crate::operators::{analytic_resolvent, maximality_probe, AnalyticOperator, OperatorGraph, ProbeReport};
use crate::representations::{j_transform, Representative, RepresentativeSpec};
use crate::witness::{extract_operator, verify_representative, SolverOptions, VerifyVerdict};

const UNIT_AXIS: Axis = Axis {
    lower: -1.0,
    upper: 1.0,
    count: 21,
};
const PROBE_AXIS: Axis = Axis {
    lower: -2.0,
    upper: 2.0,
    count: 11,
};

const CONJUGATE_NOTE: &str =
    "J(h) is computed from h restricted to the box grid, a lower bound of the exact conjugate";

/// Maps a command outcome to an exit code, reporting errors on stderr.
fn finish(outcome: Result<bool>) -> i32 {
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e @ Error::NotMonotone(..)) => {
            eprintln!("check failed: {e}");
            EXIT_FAIL
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// A representative spec file, optionally carrying a top-level `"norm"`.
fn load_representative(config: &RunConfig) -> Result<(Representative, DualityMap)> {
    let path = config
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("--input is required".into()))?;
    let value: Value = serde_json::from_str(&read_file(path)?)?;
    let dm = if value.get("norm").is_some() {
        let dm: DualityMap = serde_json::from_value(value.clone())?;
        dm.validate()?;
        dm
    } else {
        DualityMap::Euclidean
    };
    let spec: RepresentativeSpec = serde_json::from_value(value)?;
    let h = spec.build(&base_dir(path))?;
    if let Some(d) = dm.dim() {
        if d != h.dim() {
            return Err(Error::InvalidInput(format!(
                "norm has {d} weights but the representative has dimension {}",
                h.dim()
            )));
        }
    }
    Ok((h, dm))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    verdict: &'a VerifyVerdict,
    note: &'static str,
}

pub fn cmd_verify(config: &RunConfig) -> i32 {
    finish(verify_inner(config))
}

fn verify_inner(config: &RunConfig) -> Result<bool> {
    config.validate()?;
    let (h, _) = load_representative(config)?;
    let bx = config.grid(2 * h.dim(), UNIT_AXIS)?;
    let verdict = verify_representative(&h, &bx, config.tol)?;
    write_json(
        &config.out,
        "verdict.json",
        &VerifyReport {
            verdict: &verdict,
            note: CONJUGATE_NOTE,
        },
    )?;
    println!(
        "verify: {}  min h-⟨x,v⟩ = {} at [{}]  min J(h)-⟨x,v⟩ = {} at [{}]",
        if verdict.pass { "PASS" } else { "FAIL" },
        fmt_float(verdict.primal.min_gap),
        fmt_vec(&verdict.primal.argmin),
        fmt_float(verdict.transformed.min_gap),
        fmt_vec(&verdict.transformed.argmin),
    );
    Ok(verdict.pass)
}

#[derive(Serialize)]
struct ExtractReport {
    verified: bool,
    tol: f64,
    points: usize,
    monotone: bool,
    violation: Option<(usize, usize, f64)>,
}

pub fn cmd_extract(config: &RunConfig) -> i32 {
    finish(extract_inner(config))
}

fn graph_csv(g: &OperatorGraph) -> String {
    let n = g.dim();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=n).map(|i| format!("v{i}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = g
        .points()
        .iter()
        .map(|p| p.x.iter().chain(&p.v).map(|&a| fmt_float(a)).collect())
        .collect();
    csv_table(&header, &rows)
}

fn extract_inner(config: &RunConfig) -> Result<bool> {
    config.validate()?;
    let (h, _) = load_representative(config)?;
    let bx = config.grid(2 * h.dim(), UNIT_AXIS)?;
    let verified = verify_representative(&h, &bx, config.tol)?.pass;
    match extract_operator(&h, &bx, config.tol) {
        Ok(g) => {
            match config.format {
                Format::Json => write_json(&config.out, "graph.json", &g)?,
                Format::Csv => write_text(&config.out, "graph.csv", &graph_csv(&g))?,
            }
            write_json(
                &config.out,
                "extract.json",
                &ExtractReport {
                    verified,
                    tol: config.tol,
                    points: g.len(),
                    monotone: true,
                    violation: None,
                },
            )?;
            println!(
                "extract: {} points, monotone{}",
                g.len(),
                if verified { "" } else { " (representative NOT verified on this box)" }
            );
            Ok(verified)
        }
        Err(Error::NotMonotone(i, j, val)) => {
            write_json(
                &config.out,
                "extract.json",
                &ExtractReport {
                    verified,
                    tol: config.tol,
                    points: 0,
                    monotone: false,
                    violation: Some((i, j, val)),
                },
            )?;
            Err(Error::NotMonotone(i, j, val))
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct ResolveSummary<'a> {
    total: usize,
    accepted: usize,
    fraction: f64,
    tol: f64,
    budget: usize,
    errors: &'a [(usize, String)],
    note: &'static str,
}

pub fn cmd_resolve(config: &RunConfig) -> i32 {
    finish(resolve_inner(config))
}

fn certificates_csv(report: &ProbeReport) -> String {
    let rows: Vec<Vec<String>> = report
        .certificates
        .iter()
        .map(|c| {
            vec![
                fmt_vec(&c.v0),
                fmt_vec(&c.x),
                fmt_vec(&c.v),
                fmt_float(c.gap),
                fmt_float(c.fixedpoint_residual),
                fmt_float(c.c_value),
                c.iterations.to_string(),
                c.accepted.to_string(),
            ]
        })
        .collect();
    csv_table(
        &["v0", "x", "v", "gap", "fixedpoint_residual", "C", "iterations", "accepted"],
        &rows,
    )
}

fn resolve_inner(config: &RunConfig) -> Result<bool> {
    config.validate()?;
    let (h, dm) = load_representative(config)?;
    let probes = config.grid(h.dim(), PROBE_AXIS)?;
    let opts = SolverOptions::new(config.tol, config.budget)?;
    let report = maximality_probe(&h, &dm, &probes, &opts)?;
    match config.format {
        Format::Json => write_json(&config.out, "certificates.json", &report.certificates)?,
        Format::Csv => write_text(&config.out, "certificates.csv", &certificates_csv(&report))?,
    }
    write_json(
        &config.out,
        "summary.json",
        &ResolveSummary {
            total: report.total,
            accepted: report.accepted,
            fraction: report.fraction,
            tol: config.tol,
            budget: config.budget,
            errors: &report.errors,
            note: report.note,
        },
    )?;
    println!(
        "resolve: {}/{} probes accepted (fraction {})",
        report.accepted,
        report.total,
        fmt_float(report.fraction)
    );
    Ok(report.accepted == report.total)
}

/// One row of the demo summary.
#[derive(Debug, Clone, Serialize)]
pub struct DemoRow {
    pub name: String,
    pub dim: usize,
    pub verify_pass: bool,
    pub min_gap_h: f64,
    pub min_gap_jh: f64,
    pub extracted_points: usize,
    pub extract_monotone: bool,
    /// Extraction equals the box nodes on the operator graph.
    pub matches_operator: Option<bool>,
    /// `J(h)` passes both checks on the same box.
    pub self_map_pass: bool,
    pub probes: usize,
    pub accepted: usize,
    pub fraction: f64,
    pub max_resolvent_error: Option<f64>,
    pub pass: bool,
}

fn load_catalog(path: &Path) -> Result<(Vec<CatalogEntry>, PathBuf)> {
    let entries: Vec<CatalogEntry> = serde_json::from_str(&read_file(path)?)?;
    if entries.is_empty() {
        return Err(Error::InvalidInput(format!("catalog {} is empty", path.display())));
    }
    Ok((entries, base_dir(path)))
}

fn graph_matches(op: &AnalyticOperator, g: &OperatorGraph, bx: &GridSpec) -> Result<bool> {
    let n = op.dim();
    let mut expected = 0usize;
    for i in 0..bx.len() {
        let p = bx.point(i);
        if op.contains(&p[..n], &p[n..], 1e-9)? {
            expected += 1;
        }
    }
    for p in g.points() {
        if !op.contains(&p.x, &p.v, 1e-9)? {
            return Ok(false);
        }
    }
    Ok(expected == g.len())
}

/// Runs the full pipeline on one catalog entry.
pub fn run_entry(entry: &CatalogEntry, base: &Path, tol: f64, budget: usize) -> Result<DemoRow> {
    entry.bx.validate()?;
    entry.probes.validate()?;
    entry.duality.validate()?;
    let h = entry.representative.build(base)?;
    let n = h.dim();
    if entry.bx.dim() != 2 * n || entry.probes.dim() != n {
        return Err(Error::InvalidInput(format!(
            "{}: box must have {} axes and probes {}",
            entry.name,
            2 * n,
            n
        )));
    }
    if let Some(op) = &entry.operator {
        if op.dim() != n {
            return Err(Error::InvalidInput(format!("{}: operator dimension differs", entry.name)));
        }
    }
    let verdict = verify_representative(&h, &entry.bx, tol)?;
    let (extracted, monotone, matches) = match extract_operator(&h, &entry.bx, tol) {
        Ok(g) => {
            let m = match &entry.operator {
                Some(op) => Some(graph_matches(op, &g, &entry.bx)?),
                None => None,
            };
            (g.len(), true, m)
        }
        Err(Error::NotMonotone(..)) => (0, false, entry.operator.as_ref().map(|_| false)),
        Err(e) => return Err(e),
    };
    let jh = j_transform(&h, &entry.bx)?;
    let self_map_pass = verify_representative(&jh, &entry.bx, tol)?.pass;

    let opts = SolverOptions::new(tol, budget)?;
    let probe = maximality_probe(&h, &entry.duality, &entry.probes, &opts)?;
    let max_resolvent_error = match (&entry.operator, entry.duality.is_euclidean()) {
        (Some(op), true) => {
            let mut worst: f64 = 0.0;
            for c in &probe.certificates {
                let xa = analytic_resolvent(op, &entry.duality, &c.v0)?;
                let d = c.x.iter().zip(&xa).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                worst = worst.max(d);
            }
            Some(worst)
        }
        _ => None,
    };
    let pass = verdict.pass
        && monotone
        && matches != Some(false)
        && self_map_pass
        && probe.accepted == probe.total
        && max_resolvent_error.is_none_or(|e| e <= tol);
    Ok(DemoRow {
        name: entry.name.clone(),
        dim: n,
        verify_pass: verdict.pass,
        min_gap_h: verdict.primal.min_gap,
        min_gap_jh: verdict.transformed.min_gap,
        extracted_points: extracted,
        extract_monotone: monotone,
        matches_operator: matches,
        self_map_pass,
        probes: probe.total,
        accepted: probe.accepted,
        fraction: probe.fraction,
        max_resolvent_error,
        pass,
    })
}

pub fn demo_csv(rows: &[DemoRow]) -> String {
    let opt_bool = |b: Option<bool>| b.map_or("na".to_string(), |b| b.to_string());
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.dim.to_string(),
                r.verify_pass.to_string(),
                fmt_float(r.min_gap_h),
                fmt_float(r.min_gap_jh),
                r.extracted_points.to_string(),
                r.extract_monotone.to_string(),
                opt_bool(r.matches_operator),
                r.self_map_pass.to_string(),
                r.probes.to_string(),
                r.accepted.to_string(),
                fmt_float(r.fraction),
                r.max_resolvent_error.map_or("na".to_string(), fmt_float),
                r.pass.to_string(),
            ]
        })
        .collect();
    csv_table(
        &[
            "name",
            "dim",
            "verify_pass",
            "min_gap_h",
            "min_gap_jh",
            "extracted_points",
            "extract_monotone",
            "matches_operator",
            "self_map_pass",
            "probes",
            "accepted",
            "fraction",
            "max_resolvent_error",
            "pass",
        ],
        &table,
    )
}

pub fn cmd_demo(config: &RunConfig) -> i32 {
    finish(demo_inner(config))
}

fn demo_inner(config: &RunConfig) -> Result<bool> {
    config.validate()?;
    let (entries, base) = match &config.input {
        Some(path) => load_catalog(path)?,
        None => (builtin_catalog(), PathBuf::new()),
    };
    let mut rows = Vec::with_capacity(entries.len());
    for e in &entries {
        let row = run_entry(e, &base, config.tol, config.budget)?;
        println!("{:<24} {}", row.name, if row.pass { "PASS" } else { "FAIL" });
        rows.push(row);
    }
    match config.format {
        Format::Csv => write_text(&config.out, "summary.csv", &demo_csv(&rows))?,
        Format::Json => write_json(&config.out, "summary.json", &rows)?,
    }
    Ok(rows.iter().all(|r| r.pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_have_one_cell_per_column() {
        let row = DemoRow {
            name: "x".into(),
            dim: 1,
            verify_pass: true,
            min_gap_h: 0.0,
            min_gap_jh: 0.0,
            extracted_points: 3,
            extract_monotone: true,
            matches_operator: None,
            self_map_pass: true,
            probes: 1,
            accepted: 1,
            fraction: 1.0,
            max_resolvent_error: None,
            pass: true,
        };
        let csv = demo_csv(&[row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
        assert!(lines[1].contains(",na,"));
    }

    #[test]
    fn entry_pipeline_on_identity() {
        let entry = &builtin_catalog()[0];
        let row = run_entry(entry, Path::new("."), 1e-4, 200_000).unwrap();
        assert!(row.pass, "{row:?}");
        assert_eq!(row.extracted_points, 21);
    }
}
