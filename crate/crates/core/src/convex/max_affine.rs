use serde::{Deserialize, Serialize};

use super::grid::{GridFn, GridSpec};
use super::simplex::{solve_equality_lp, LpOutcome};
use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

/// One affine map `p ↦ ⟨slope, p⟩ + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub offset: f64,
}

/// Pointwise maximum of finitely many affine maps on `ℝᵈ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxAffineFn {
    dim: usize,
    pieces: Vec<AffinePiece>,
}

impl MaxAffineFn {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let first = pieces
            .first()
            .ok_or_else(|| Error::InvalidInput("max-affine function needs at least one piece".into()))?;
        let dim = first.slope.len();
        if dim == 0 {
            return Err(Error::InvalidInput("affine pieces must have positive dimension".into()));
        }
        for p in &pieces {
            check_dim(dim, p.slope.len())?;
            if !p.offset.is_finite() || p.slope.iter().any(|s| !s.is_finite()) {
                return Err(Error::InvalidInput("affine piece with non-finite data".into()));
            }
        }
        Ok(MaxAffineFn { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        check_dim(self.dim, p.len())?;
        Ok(self.eval_unchecked(p))
    }

    pub(crate) fn eval_unchecked(&self, p: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|piece| dot(&piece.slope, p) + piece.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index and value of the first piece attaining the maximum.
    pub fn argmax(&self, p: &[f64]) -> Result<(usize, f64)> {
        check_dim(self.dim, p.len())?;
        let mut best = (0, f64::NEG_INFINITY);
        for (i, piece) in self.pieces.iter().enumerate() {
            let v = dot(&piece.slope, p) + piece.offset;
            if v > best.1 {
                best = (i, v);
            }
        }
        Ok(best)
    }

    /// Indices of the pieces within `tol` of the maximum at `p`.
    pub fn active(&self, p: &[f64], tol: f64) -> Result<Vec<usize>> {
        let (_, best) = self.argmax(p)?;
        Ok(self
            .pieces
            .iter()
            .enumerate()
            .filter(|(_, piece)| dot(&piece.slope, p) + piece.offset >= best - tol)
            .map(|(i, _)| i)
            .collect())
    }

    /// Exact conjugate value at `q`:
    ///
    /// ```text
    /// m*(q) = min { −Σ λⱼ offsetⱼ : Σ λⱼ slopeⱼ = q, λ ∈ simplex }
    /// ```
    ///
    /// which is `+∞` when `q` lies outside the convex hull of the slopes.
    pub fn conjugate_at(&self, q: &[f64]) -> Result<f64> {
        check_dim(self.dim, q.len())?;
        let k = self.pieces.len();
        let mut rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| self.pieces.iter().map(|p| p.slope[i]).collect())
            .collect();
        rows.push(vec![1.0; k]);
        let mut rhs = q.to_vec();
        rhs.push(1.0);
        let cost: Vec<f64> = self.pieces.iter().map(|p| -p.offset).collect();
        match solve_equality_lp(&rows, &rhs, &cost) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Ok(f64::INFINITY),
            // the feasible set is a subset of the simplex, hence bounded
            LpOutcome::Unbounded => unreachable!("bounded LP reported unbounded"),
        }
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridFn> {
        check_dim(self.dim, spec.dim())?;
        GridFn::from_fn(spec.clone(), |p| self.eval_unchecked(p))
    }
}
