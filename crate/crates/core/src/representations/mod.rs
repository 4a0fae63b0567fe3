//! Representative functions `h: X × X* → ℝ ∪ {+∞}`: Fitzpatrick functions of
//! finite graphs, sampled grids, closed forms and convex combinations, plus
//! the `J`-transform and the membership and minimality checks.

pub mod closed;
pub mod domain;
pub mod spec;

use rayon::prelude::*;
use serde::Serialize;

pub use closed::{fitzpatrick_linear_closed_form, AffinePhi, ClosedForm, ClosedSpec};
pub use domain::Domain;
pub use spec::RepresentativeSpec;

use crate::convex::{conjugate_nd, AffinePiece, GridFn, GridSpec, MaxAffineFn};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2};
use crate::operators::OperatorGraph;

/// Fitzpatrick function of a finite graph, kept with the graph it came from.
#[derive(Debug, Clone)]
pub struct FitzpatrickFn {
    graph: OperatorGraph,
    pieces: MaxAffineFn,
}

impl FitzpatrickFn {
    /// One affine piece per graph point `(y, u)`: slope `(u, y)`, offset
    /// `−⟨y, u⟩`, so that the maximum is `sup ⟨x − y, u − v⟩ + ⟨x, v⟩`.
    pub fn new(graph: OperatorGraph) -> Result<Self> {
        if graph.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let pieces = graph
            .points()
            .iter()
            .map(|p| {
                let mut slope = p.v.clone();
                slope.extend_from_slice(&p.x);
                AffinePiece {
                    slope,
                    offset: -dot(&p.x, &p.v),
                }
            })
            .collect();
        Ok(FitzpatrickFn {
            graph,
            pieces: MaxAffineFn::new(pieces)?,
        })
    }

    pub fn graph(&self) -> &OperatorGraph {
        &self.graph
    }

    pub fn max_affine(&self) -> &MaxAffineFn {
        &self.pieces
    }

    /// `J(φ)(x, v) = φ*(v, x)` through the exact max-affine conjugate.
    pub fn j_transform_at(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        let mut q = v.to_vec();
        q.extend_from_slice(x);
        self.pieces.conjugate_at(&q)
    }
}

/// A convex function on `ℝⁿ × ℝⁿ` in one of four forms.
#[derive(Debug, Clone)]
pub enum Representative {
    Fitzpatrick(FitzpatrickFn),
    /// Sampled on a `2n`-dimensional grid, `(x, v)` axis order.
    Grid(GridFn),
    Closed(ClosedForm),
    /// Convex combination; weights lie in the simplex.
    Mix(Vec<(f64, Representative)>),
}

impl Representative {
    pub fn fitzpatrick(graph: OperatorGraph) -> Result<Self> {
        Ok(Representative::Fitzpatrick(FitzpatrickFn::new(graph)?))
    }

    pub fn grid(f: GridFn) -> Result<Self> {
        f.spec().split_blocks()?;
        Ok(Representative::Grid(f))
    }

    pub fn closed(spec: &ClosedSpec) -> Result<Self> {
        Ok(Representative::Closed(ClosedForm::from_spec(spec)?))
    }

    pub fn mix(parts: Vec<(f64, Representative)>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("convex combination needs at least one part".into()))?;
        let n = first.1.dim();
        let mut total = 0.0;
        for (w, r) in &parts {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidInput(format!("mix weight {w} is not in [0, ∞)")));
            }
            check_dim(n, r.dim())?;
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("mix weights sum to {total}, expected 1")));
        }
        Ok(Representative::Mix(parts))
    }

    /// Half-dimension `n` of the ambient space `ℝⁿ × ℝⁿ`.
    pub fn dim(&self) -> usize {
        match self {
            Representative::Fitzpatrick(f) => f.graph.dim(),
            Representative::Grid(g) => g.spec().dim() / 2,
            Representative::Closed(c) => c.dim(),
            Representative::Mix(parts) => parts[0].1.dim(),
        }
    }

    pub fn eval(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), v.len())?;
        Ok(self.eval_unchecked(x, v))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], v: &[f64]) -> f64 {
        match self {
            Representative::Fitzpatrick(f) => {
                let mut p = x.to_vec();
                p.extend_from_slice(v);
                f.pieces.eval_unchecked(&p)
            }
            Representative::Grid(g) => {
                let mut p = x.to_vec();
                p.extend_from_slice(v);
                g.interpolate(&p).unwrap_or(f64::INFINITY)
            }
            Representative::Closed(c) => c.eval(x, v),
            Representative::Mix(parts) => {
                let mut acc = 0.0;
                for (w, r) in parts {
                    if *w == 0.0 {
                        continue;
                    }
                    let val = r.eval_unchecked(x, v);
                    if val.is_infinite() {
                        return f64::INFINITY;
                    }
                    acc += w * val;
                }
                acc
            }
        }
    }

    /// Element of `∂h(x, v)` (a finite-difference slope for grids), chosen
    /// close to `−smooth` where `h` is not differentiable.
    pub fn subgradient(&self, x: &[f64], v: &[f64], smooth: &[f64]) -> Vec<f64> {
        match self {
            Representative::Fitzpatrick(f) => {
                let mut p = x.to_vec();
                p.extend_from_slice(v);
                let (_, best) = f.pieces.argmax(&p).expect("dimension checked by caller");
                let tol = 1e-12 * (1.0 + best.abs());
                let mut choice: Option<(f64, &AffinePiece)> = None;
                for piece in f.pieces.pieces() {
                    if dot(&piece.slope, &p) + piece.offset < best - tol {
                        continue;
                    }
                    let d: Vec<f64> = piece.slope.iter().zip(smooth).map(|(a, b)| a + b).collect();
                    let score = norm2(&d);
                    if choice.is_none_or(|(s, _)| score < s) {
                        choice = Some((score, piece));
                    }
                }
                choice.expect("at least one active piece").1.slope.clone()
            }
            Representative::Grid(g) => {
                let mut p = x.to_vec();
                p.extend_from_slice(v);
                g.difference_gradient(&p).unwrap_or_else(|_| vec![0.0; p.len()])
            }
            Representative::Closed(c) => c.subgradient(x, v, smooth),
            Representative::Mix(parts) => {
                let mut g = vec![0.0; 2 * x.len()];
                for (w, r) in parts {
                    if *w == 0.0 {
                        continue;
                    }
                    for (gi, si) in g.iter_mut().zip(r.subgradient(x, v, smooth)) {
                        *gi += w * si;
                    }
                }
                g
            }
        }
    }

    /// Closed convex set containing the effective domain.
    pub fn domain(&self) -> Domain {
        match self {
            Representative::Fitzpatrick(_) => Domain::Whole,
            Representative::Grid(g) => Domain::Box {
                lower: g.spec().lower().to_vec(),
                upper: g.spec().upper().to_vec(),
            },
            Representative::Closed(c) => c.domain(),
            Representative::Mix(parts) => Domain::intersect(
                parts
                    .iter()
                    .filter(|(w, _)| *w > 0.0)
                    .map(|(_, r)| r.domain())
                    .collect(),
            ),
        }
    }

    /// Grid this representative is stored on, if it is a grid.
    pub fn as_grid(&self) -> Option<&GridFn> {
        match self {
            Representative::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// Values at every node of a `2n`-dimensional grid.
    pub fn sample(&self, spec: &GridSpec) -> Result<GridFn> {
        check_dim(2 * self.dim(), spec.dim())?;
        let n = self.dim();
        let values: Vec<f64> = (0..spec.len())
            .into_par_iter()
            .map(|i| {
                let p = spec.point(i);
                self.eval_unchecked(&p[..n], &p[n..])
            })
            .collect();
        GridFn::new(spec.clone(), values)
    }
}

/// `φ_G(x, v) = max_{(y,u) ∈ G} ⟨x, u⟩ + ⟨y, v⟩ − ⟨y, u⟩`.
pub fn fitzpatrick_eval(g: &OperatorGraph, x: &[f64], v: &[f64]) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    check_dim(g.dim(), x.len())?;
    check_dim(g.dim(), v.len())?;
    Ok(g.points()
        .iter()
        .map(|p| dot(x, &p.v) + dot(&p.x, v) - dot(&p.x, &p.v))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `J(h)(x, v) = h*(v, x)` on the nodes of `eval_spec`.
///
/// `h` is sampled on `eval_spec`, conjugated onto the block-swapped grid (so
/// that `(v, x)` is a dual node whenever `(x, v)` is a node of `eval_spec`),
/// and the result is read back with the blocks exchanged.
pub fn j_transform(h: &Representative, eval_spec: &GridSpec) -> Result<Representative> {
    let sampled = match h.as_grid() {
        Some(g) if g.spec() == eval_spec => g.clone(),
        _ => h.sample(eval_spec)?,
    };
    Ok(Representative::Grid(j_transform_grid(&sampled)?))
}

/// [`j_transform`] for a function already sampled on its evaluation grid.
pub fn j_transform_grid(h: &GridFn) -> Result<GridFn> {
    let spec = h.spec();
    let swapped = spec.swap_blocks()?;
    let hstar = conjugate_nd(h, &swapped)?;
    let n = spec.dim() / 2;
    let values: Vec<f64> = (0..spec.len())
        .map(|i| {
            let idx = spec.unravel(i);
            let mut sw = idx[n..].to_vec();
            sw.extend_from_slice(&idx[..n]);
            hstar.at_index(&sw)
        })
        .collect();
    GridFn::new(spec.clone(), values)
}

/// Default membership tolerance `c · Δ²` with `Δ` the coarsest grid spacing.
pub fn sampling_tolerance(spec: &GridSpec, c: f64) -> f64 {
    let d = (0..spec.dim()).map(|a| spec.spacing(a)).fold(0.0, f64::max);
    c * d * d
}

/// Outcome of [`membership_check`].
#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub pass: bool,
    /// `min h(x,v) − ⟨x,v⟩` over the box grid and where it is attained.
    pub min_gap: f64,
    pub min_gap_at: Vec<f64>,
    pub lower_bound_holds: bool,
    /// `max |h(x,v) − ⟨x,v⟩|` over graph points and the worst point index.
    pub max_graph_deviation: f64,
    pub worst_graph_point: Option<usize>,
    pub graph_equality_holds: bool,
    pub tol: f64,
}

/// Checks `h ≥ ⟨·,·⟩` on the box grid and `h = ⟨·,·⟩` on the graph sample.
/// A finite graph is never maximal, so passing is only meaningful up to a
/// tolerance tied to the sampling density (see [`sampling_tolerance`]).
pub fn membership_check(h: &Representative, g: &OperatorGraph, bx: &GridSpec, tol: f64) -> Result<MembershipVerdict> {
    check_dim(h.dim(), g.dim())?;
    let (min_gap, at) = min_coupling_gap(h, bx)?;
    let mut max_dev: f64 = 0.0;
    let mut worst = None;
    for (i, p) in g.points().iter().enumerate() {
        let dev = (h.eval_unchecked(&p.x, &p.v) - dot(&p.x, &p.v)).abs();
        if worst.is_none() || dev > max_dev {
            max_dev = dev;
            worst = Some(i);
        }
    }
    let lower_bound_holds = min_gap >= -tol;
    let graph_equality_holds = max_dev <= tol;
    Ok(MembershipVerdict {
        pass: lower_bound_holds && graph_equality_holds,
        min_gap,
        min_gap_at: at,
        lower_bound_holds,
        max_graph_deviation: max_dev,
        worst_graph_point: worst,
        graph_equality_holds,
        tol,
    })
}

/// `min (h(x,v) − ⟨x,v⟩)` over the nodes of `bx`, with its first minimizer.
pub fn min_coupling_gap(h: &Representative, bx: &GridSpec) -> Result<(f64, Vec<f64>)> {
    let sampled = h.sample(bx)?;
    Ok(min_grid_gap(&sampled))
}

pub(crate) fn min_grid_gap(f: &GridFn) -> (f64, Vec<f64>) {
    let spec = f.spec();
    let n = spec.dim() / 2;
    let gaps: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|i| {
            let p = spec.point(i);
            f.at(i) - dot(&p[..n], &p[n..])
        })
        .collect();
    let (best, val) = gaps
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &g)| if g < b.1 { (i, g) } else { b });
    (val, spec.point(best))
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateVerdict {
    pub pass: bool,
    /// `max φ − candidate` over the box grid (≤ tol to pass).
    pub worst_excess: f64,
    pub worst_at: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalityVerdict {
    pub pass: bool,
    pub candidates: Vec<CandidateVerdict>,
}

/// Checks `φ_G ≤ candidate + tol` at every node of `bx`, per candidate.
pub fn minimality_check(
    g: &OperatorGraph,
    candidates: &[Representative],
    bx: &GridSpec,
    tol: f64,
) -> Result<MinimalityVerdict> {
    let phi = Representative::fitzpatrick(g.clone())?;
    let phi_vals = phi.sample(bx)?;
    let mut out = Vec::with_capacity(candidates.len());
    for c in candidates {
        check_dim(g.dim(), c.dim())?;
        let cv = c.sample(bx)?;
        let mut worst = (f64::NEG_INFINITY, 0usize);
        for i in 0..bx.len() {
            let cand = cv.at(i);
            let excess = if cand.is_infinite() { f64::NEG_INFINITY } else { phi_vals.at(i) - cand };
            if excess > worst.0 {
                worst = (excess, i);
            }
        }
        out.push(CandidateVerdict {
            pass: worst.0 <= tol,
            worst_excess: worst.0,
            worst_at: bx.point(worst.1),
        });
    }
    Ok(MinimalityVerdict {
        pass: out.iter().all(|c| c.pass),
        candidates: out,
    })
}
