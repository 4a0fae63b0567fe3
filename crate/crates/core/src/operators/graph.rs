use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, sub};
use crate::MONOTONICITY_TOL;

/// One primal–dual pair `(x, v)` with `v ∈ T(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// A finite sample of the graph of an operator `T: ℝⁿ ⇉ ℝⁿ`. Duplicate pairs
/// are dropped on construction; insertion order is otherwise kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct OperatorGraph {
    dim: usize,
    points: Vec<GraphPoint>,
}

#[derive(Deserialize)]
struct RawGraph {
    dim: usize,
    points: Vec<GraphPoint>,
}

impl TryFrom<RawGraph> for OperatorGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        OperatorGraph::new(raw.dim, raw.points)
    }
}

impl OperatorGraph {
    pub fn new(dim: usize, points: Vec<GraphPoint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("graph dimension must be positive".into()));
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(points.len());
        for p in points {
            check_dim(dim, p.x.len())?;
            check_dim(dim, p.v.len())?;
            if p.x.iter().chain(&p.v).any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("graph point with non-finite coordinate".into()));
            }
            let key: Vec<u64> = p.x.iter().chain(&p.v).map(|c| (c + 0.0).to_bits()).collect();
            if seen.insert(key) {
                kept.push(p);
            }
        }
        Ok(OperatorGraph { dim, points: kept })
    }

    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (Vec<f64>, Vec<f64>)>) -> Result<Self> {
        Self::new(dim, pairs.into_iter().map(|(x, v)| GraphPoint { x, v }).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[GraphPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Outcome of [`monotonicity_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityVerdict {
    pub monotone: bool,
    /// First violating pair `(i, j)`, `i < j`, and its pairing value.
    pub violation: Option<(usize, usize, f64)>,
}

/// `⟨xᵢ − xⱼ, vᵢ − vⱼ⟩ ≥ −1e−12` over all pairs.
pub fn monotonicity_check(g: &OperatorGraph) -> MonotonicityVerdict {
    let pts = g.points();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let p = dot(&sub(&pts[i].x, &pts[j].x), &sub(&pts[i].v, &pts[j].v));
            if p < -MONOTONICITY_TOL {
                return MonotonicityVerdict {
                    monotone: false,
                    violation: Some((i, j, p)),
                };
            }
        }
    }
    MonotonicityVerdict {
        monotone: true,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(pairs: &[(f64, f64)]) -> OperatorGraph {
        OperatorGraph::from_pairs(1, pairs.iter().map(|&(x, v)| (vec![x], vec![v]))).unwrap()
    }

    #[test]
    fn monotonicity_examples() {
        assert!(monotonicity_check(&g1(&[(0.0, 0.0), (1.0, 1.0)])).monotone);
        let bad = monotonicity_check(&g1(&[(0.0, 0.0), (1.0, -1.0)]));
        assert!(!bad.monotone);
        assert_eq!(bad.violation.map(|(i, j, _)| (i, j)), Some((0, 1)));
        let rot = OperatorGraph::from_pairs(
            2,
            vec![(vec![1.0, 0.0], vec![0.0, 1.0]), (vec![0.0, 1.0], vec![-1.0, 0.0])],
        )
        .unwrap();
        assert!(monotonicity_check(&rot).monotone);
    }

    #[test]
    fn duplicates_are_dropped() {
        let g = g1(&[(0.0, 1.0), (0.0, 1.0), (-0.0, 1.0), (0.0, 2.0)]);
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn ragged_points_rejected() {
        assert!(OperatorGraph::from_pairs(2, vec![(vec![1.0], vec![1.0, 2.0])]).is_err());
        assert!(OperatorGraph::from_pairs(0, Vec::<(Vec<f64>, Vec<f64>)>::new()).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let g = g1(&[(0.0, 1.0)]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<OperatorGraph>(&s).unwrap(), g);
        assert!(serde_json::from_str::<OperatorGraph>(r#"{"dim":1,"points":[{"x":[1,2],"v":[0]}]}"#).is_err());
    }
}
