use rayon::prelude::*;
use serde::Serialize;

use crate::convex::GridSpec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;
use crate::operators::{monotonicity_check, GraphPoint, OperatorGraph};
use crate::representations::{j_transform_grid, Representative};

/// Smallest value of `f(x,v) − ⟨x,v⟩` over a grid and a node attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub min_gap: f64,
    pub argmin: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyVerdict {
    pub pass: bool,
    pub tol: f64,
    /// `h(x,v) − ⟨x,v⟩` over the box.
    pub primal: GapReport,
    /// `J(h)(x,v) − ⟨x,v⟩` over the box, with `J(h)` the conjugate of the
    /// restriction of `h` to the box grid.
    pub transformed: GapReport,
}

fn gap_report(values: &[f64], spec: &GridSpec) -> GapReport {
    let n = spec.dim() / 2;
    let gaps: Vec<f64> = values
        .par_iter()
        .enumerate()
        .map(|(i, &h)| {
            let p = spec.point(i);
            h - dot(&p[..n], &p[n..])
        })
        .collect();
    let (best, min_gap) = gaps
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &g)| if g < b.1 { (i, g) } else { b });
    GapReport {
        min_gap,
        argmin: spec.point(best),
    }
}

/// Checks both representative inequalities at every node of `bx`, a grid
/// over `ℝⁿ × ℝⁿ`.
///
/// The conjugate is taken over the grid only, so it is a lower bound of the
/// true `h*` and the second check is conservative. It is meaningful when the
/// box contains, for each node `(x,v)`, graph pairs `(y,u)` with
/// `⟨x − y, v − u⟩ ≤ 0`.
pub fn verify_representative(h: &Representative, bx: &GridSpec, tol: f64) -> Result<VerifyVerdict> {
    check_dim(2 * h.dim(), bx.dim())?;
    let sampled = match h.as_grid() {
        Some(g) if g.spec() == bx => g.clone(),
        _ => h.sample(bx)?,
    };
    let primal = gap_report(sampled.values(), bx);
    let jh = j_transform_grid(&sampled)?;
    let transformed = gap_report(jh.values(), bx);
    Ok(VerifyVerdict {
        pass: primal.min_gap >= -tol && transformed.min_gap >= -tol,
        tol,
        primal,
        transformed,
    })
}

/// Grid nodes with `h(x,v) − ⟨x,v⟩ ≤ tol`, in grid order.
///
/// Fails with [`Error::NotMonotone`] when the extracted set is not monotone,
/// which means either `tol` is too loose or `h` is not a representative.
pub fn extract_operator(h: &Representative, bx: &GridSpec, tol: f64) -> Result<OperatorGraph> {
    check_dim(2 * h.dim(), bx.dim())?;
    let n = h.dim();
    let sampled = match h.as_grid() {
        Some(g) if g.spec() == bx => g.clone(),
        _ => h.sample(bx)?,
    };
    let points: Vec<GraphPoint> = (0..bx.len())
        .filter_map(|i| {
            let p = bx.point(i);
            let gap = sampled.at(i) - dot(&p[..n], &p[n..]);
            (gap <= tol).then(|| GraphPoint {
                x: p[..n].to_vec(),
                v: p[n..].to_vec(),
            })
        })
        .collect();
    let g = OperatorGraph::new(n, points)?;
    let verdict = monotonicity_check(&g);
    if let Some((i, j, val)) = verdict.violation {
        return Err(Error::NotMonotone(i, j, val));
    }
    Ok(g)
}
