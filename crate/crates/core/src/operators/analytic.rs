use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::graph::{GraphPoint, OperatorGraph};
use crate::convex::GridSpec;
use crate::duality::DualityMap;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{mat_vec, matrix_from_rows, min_sym_eigenvalue};

/// Relative tolerance for the positive-semidefinite checks.
const PSD_TOL: f64 = 1e-12;
/// Tolerance for deciding that a coordinate sits on a box face.
const FACE_TOL: f64 = 1e-12;

/// Catalog of maximal monotone operators with closed-form resolvents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", try_from = "RawOperator", into = "RawOperator")]
pub enum AnalyticOperator {
    /// `T(x) = Ax` with `A + Aᵀ ⪰ 0`.
    Linear { a: Vec<Vec<f64>> },
    /// `T = ∇(½xᵀAx + bᵀx) = Ax + b` with `A` symmetric `⪰ 0`.
    SubdiffQuadratic { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// Rotation of the plane by `theta`, `|theta| ≤ π/2`.
    Rotation2d { theta: f64 },
    /// Normal cone of the box `[lower, upper]`.
    NormalConeBox { lower: Vec<f64>, upper: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RawOperator {
    #[serde(rename = "linear")]
    Linear {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    #[serde(rename = "subdiff-quadratic")]
    SubdiffQuadratic {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    #[serde(rename = "rotation2d")]
    Rotation2d { theta: f64 },
    #[serde(rename = "normal-cone-box")]
    NormalConeBox { lower: Vec<f64>, upper: Vec<f64> },
}

impl TryFrom<RawOperator> for AnalyticOperator {
    type Error = Error;

    fn try_from(raw: RawOperator) -> Result<Self> {
        let op = match raw {
            RawOperator::Linear { a } => AnalyticOperator::Linear { a },
            RawOperator::SubdiffQuadratic { a, b } => AnalyticOperator::SubdiffQuadratic { a, b },
            RawOperator::Rotation2d { theta } => AnalyticOperator::Rotation2d { theta },
            RawOperator::NormalConeBox { lower, upper } => AnalyticOperator::NormalConeBox { lower, upper },
        };
        op.validate()?;
        Ok(op)
    }
}

impl From<AnalyticOperator> for RawOperator {
    fn from(op: AnalyticOperator) -> Self {
        match op {
            AnalyticOperator::Linear { a } => RawOperator::Linear { a },
            AnalyticOperator::SubdiffQuadratic { a, b } => RawOperator::SubdiffQuadratic { a, b },
            AnalyticOperator::Rotation2d { theta } => RawOperator::Rotation2d { theta },
            AnalyticOperator::NormalConeBox { lower, upper } => RawOperator::NormalConeBox { lower, upper },
        }
    }
}

/// Outward normals emitted at box faces by [`sample_graph`]: magnitudes
/// `step, 2·step, …, count·step` along each active face normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFan {
    pub count: usize,
    pub step: f64,
}

impl Default for NormalFan {
    fn default() -> Self {
        NormalFan { count: 5, step: 1.0 }
    }
}

impl AnalyticOperator {
    pub fn linear(a: Vec<Vec<f64>>) -> Result<Self> {
        let op = AnalyticOperator::Linear { a };
        op.validate()?;
        Ok(op)
    }

    pub fn subdiff_quadratic(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let op = AnalyticOperator::SubdiffQuadratic { a, b };
        op.validate()?;
        Ok(op)
    }

    pub fn rotation(theta: f64) -> Result<Self> {
        let op = AnalyticOperator::Rotation2d { theta };
        op.validate()?;
        Ok(op)
    }

    pub fn normal_cone_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let op = AnalyticOperator::NormalConeBox { lower, upper };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AnalyticOperator::Linear { a } => {
                let m = matrix_from_rows(a)?;
                let scale = m.amax().max(1.0);
                if min_sym_eigenvalue(&m) < -PSD_TOL * scale {
                    return Err(Error::Precondition("linear operator requires A + Aᵀ ⪰ 0".into()));
                }
            }
            AnalyticOperator::SubdiffQuadratic { a, b } => {
                let m = matrix_from_rows(a)?;
                check_dim(m.nrows(), b.len())?;
                let scale = m.amax().max(1.0);
                if (&m - m.transpose()).amax() > PSD_TOL * scale {
                    return Err(Error::Precondition("subdiff-quadratic requires symmetric A".into()));
                }
                if min_sym_eigenvalue(&m) < -PSD_TOL * scale {
                    return Err(Error::Precondition("subdiff-quadratic requires A ⪰ 0".into()));
                }
                if b.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidInput("b has a non-finite entry".into()));
                }
            }
            AnalyticOperator::Rotation2d { theta } => {
                if !theta.is_finite() || theta.abs() > std::f64::consts::FRAC_PI_2 + 1e-15 {
                    return Err(Error::Precondition(format!(
                        "rotation angle must satisfy |theta| ≤ π/2, got {theta}"
                    )));
                }
            }
            AnalyticOperator::NormalConeBox { lower, upper } => {
                if lower.is_empty() {
                    return Err(Error::InvalidInput("box needs at least one axis".into()));
                }
                check_dim(lower.len(), upper.len())?;
                for (i, (l, u)) in lower.iter().zip(upper).enumerate() {
                    if !(l.is_finite() && u.is_finite() && l <= u) {
                        return Err(Error::InvalidInput(format!("box axis {i}: need lower ≤ upper")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            AnalyticOperator::Linear { a } => a.len(),
            AnalyticOperator::SubdiffQuadratic { a, .. } => a.len(),
            AnalyticOperator::Rotation2d { .. } => 2,
            AnalyticOperator::NormalConeBox { lower, .. } => lower.len(),
        }
    }

    /// `(M, c)` with `T(x) = Mx + c` for the single-valued kinds.
    pub fn affine_parts(&self) -> Option<(DMatrix<f64>, Vec<f64>)> {
        match self {
            AnalyticOperator::Linear { a } => {
                let m = matrix_from_rows(a).ok()?;
                let n = m.nrows();
                Some((m, vec![0.0; n]))
            }
            AnalyticOperator::SubdiffQuadratic { a, b } => Some((matrix_from_rows(a).ok()?, b.clone())),
            AnalyticOperator::Rotation2d { theta } => {
                let (s, c) = theta.sin_cos();
                Some((DMatrix::from_row_slice(2, 2, &[c, -s, s, c]), vec![0.0, 0.0]))
            }
            AnalyticOperator::NormalConeBox { .. } => None,
        }
    }

    /// `T(x)` for single-valued kinds.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let (m, c) = self
            .affine_parts()
            .ok_or_else(|| Error::Unsupported("normal cone is set-valued".into()))?;
        Ok(mat_vec(&m, x).iter().zip(&c).map(|(a, b)| a + b).collect())
    }

    /// Whether `v ∈ T(x)` up to `tol`.
    pub fn contains(&self, x: &[f64], v: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), v.len())?;
        match self {
            AnalyticOperator::NormalConeBox { lower, upper } => {
                for i in 0..x.len() {
                    if x[i] < lower[i] - tol || x[i] > upper[i] + tol {
                        return Ok(false);
                    }
                    let at_lo = (x[i] - lower[i]).abs() <= tol;
                    let at_hi = (x[i] - upper[i]).abs() <= tol;
                    let ok = match (at_lo, at_hi) {
                        (true, true) => true,
                        (true, false) => v[i] <= tol,
                        (false, true) => v[i] >= -tol,
                        (false, false) => v[i].abs() <= tol,
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => {
                let tx = self.apply(x)?;
                Ok(tx.iter().zip(v).all(|(a, b)| (a - b).abs() <= tol))
            }
        }
    }
}

/// Sample the graph of `op` at the nodes of `grid`. The normal cone emits
/// `(x, 0)` at every node inside its box plus a fan of outward normals on
/// each active face; nodes outside the box carry no pairs.
pub fn sample_graph(op: &AnalyticOperator, grid: &GridSpec) -> Result<OperatorGraph> {
    sample_graph_with_fan(op, grid, NormalFan::default())
}

pub fn sample_graph_with_fan(op: &AnalyticOperator, grid: &GridSpec, fan: NormalFan) -> Result<OperatorGraph> {
    check_dim(op.dim(), grid.dim())?;
    let n = op.dim();
    let mut points = Vec::new();
    match op {
        AnalyticOperator::NormalConeBox { lower, upper } => {
            for x in grid.points() {
                let inside = (0..n).all(|i| x[i] >= lower[i] - FACE_TOL && x[i] <= upper[i] + FACE_TOL);
                if !inside {
                    continue;
                }
                points.push(GraphPoint { x: x.clone(), v: vec![0.0; n] });
                for i in 0..n {
                    for (face, sign) in [(lower[i], -1.0), (upper[i], 1.0)] {
                        if (x[i] - face).abs() <= FACE_TOL {
                            for k in 1..=fan.count {
                                let mut v = vec![0.0; n];
                                v[i] = sign * k as f64 * fan.step;
                                points.push(GraphPoint { x: x.clone(), v });
                            }
                        }
                    }
                }
            }
        }
        _ => {
            for x in grid.points() {
                let v = op.apply(&x)?;
                points.push(GraphPoint { x, v });
            }
        }
    }
    OperatorGraph::new(n, points)
}

/// The unique `x` with `v0 ∈ T(x) + x` (Euclidean duality map only).
pub fn analytic_resolvent(op: &AnalyticOperator, dm: &DualityMap, v0: &[f64]) -> Result<Vec<f64>> {
    if !dm.is_euclidean() {
        return Err(Error::Unsupported(
            "closed-form resolvents assume the Euclidean duality map".into(),
        ));
    }
    check_dim(op.dim(), v0.len())?;
    match op {
        AnalyticOperator::NormalConeBox { lower, upper } => Ok(v0
            .iter()
            .zip(lower.iter().zip(upper))
            .map(|(v, (l, u))| v.clamp(*l, *u))
            .collect()),
        _ => {
            let (m, c) = op.affine_parts().expect("single-valued kind");
            let n = m.nrows();
            let lhs = m + DMatrix::identity(n, n);
            let rhs = DVector::from_iterator(n, v0.iter().zip(&c).map(|(v, ci)| v - ci));
            // A + I has symmetric part ⪰ I, so it is nonsingular
            let x = lhs
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Precondition("T + I is singular".into()))?;
            Ok(x.as_slice().to_vec())
        }
    }
}
