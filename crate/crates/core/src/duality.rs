//! Smooth norms on `ℝⁿ` and their duality maps.
//!
//! `J` is the gradient of `½‖x‖²` and `J_*` the gradient of `½‖v‖²_*`; the two
//! are mutually inverse and satisfy `⟨x, J(x)⟩ = ‖x‖² = ‖J(x)‖²_*`. The
//! pairing between `X` and `X*` is always the plain dot product.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;

/// Default absolute tolerance for certifying `pairing_defect = 0`.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "lowercase")]
pub enum DualityMap {
    /// `‖x‖² = Σ xᵢ²`, `J = id`.
    #[default]
    Euclidean,
    /// `‖x‖² = Σ wᵢ xᵢ²`, `‖v‖²_* = Σ vᵢ² / wᵢ`, `J(x) = (wᵢ xᵢ)`.
    Weighted { weights: Vec<f64> },
}

/// Result of [`DualityMap::pairing_defect`].
#[derive(Debug, Clone, PartialEq)]
pub struct PairingDefect {
    pub value: f64,
    /// `−J(z)`, present when `value` is within the equality tolerance.
    pub equality_witness: Option<Vec<f64>>,
}

impl DualityMap {
    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        let dm = DualityMap::Weighted { weights };
        dm.validate()?;
        Ok(dm)
    }

    pub fn validate(&self) -> Result<()> {
        if let DualityMap::Weighted { weights } = self {
            if weights.is_empty() {
                return Err(Error::InvalidInput("weighted norm needs at least one weight".into()));
            }
            if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                return Err(Error::InvalidInput(format!("weights must be positive and finite, got {w}")));
            }
        }
        Ok(())
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, DualityMap::Euclidean)
    }

    /// Dimension fixed by the map, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DualityMap::Euclidean => None,
            DualityMap::Weighted { weights } => Some(weights.len()),
        }
    }

    fn check(&self, len: usize) -> Result<()> {
        match self.dim() {
            Some(n) => check_dim(n, len),
            None => Ok(()),
        }
    }

    pub fn norm_sq(&self, x: &[f64]) -> Result<f64> {
        self.check(x.len())?;
        Ok(match self {
            DualityMap::Euclidean => dot(x, x),
            DualityMap::Weighted { weights } => x.iter().zip(weights).map(|(a, w)| w * a * a).sum(),
        })
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        Ok(self.norm_sq(x)?.sqrt())
    }

    pub fn dual_norm_sq(&self, v: &[f64]) -> Result<f64> {
        self.check(v.len())?;
        Ok(match self {
            DualityMap::Euclidean => dot(v, v),
            DualityMap::Weighted { weights } => v.iter().zip(weights).map(|(a, w)| a * a / w).sum(),
        })
    }

    pub fn dual_norm(&self, v: &[f64]) -> Result<f64> {
        Ok(self.dual_norm_sq(v)?.sqrt())
    }

    /// `J(x)`, the gradient of `½‖x‖²`.
    pub fn jmap(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x.len())?;
        Ok(match self {
            DualityMap::Euclidean => x.to_vec(),
            DualityMap::Weighted { weights } => x.iter().zip(weights).map(|(a, w)| w * a).collect(),
        })
    }

    /// `J_*(v)`, the gradient of `½‖v‖²_*` and the inverse of `J`.
    pub fn jstar(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v.len())?;
        Ok(match self {
            DualityMap::Euclidean => v.to_vec(),
            DualityMap::Weighted { weights } => v.iter().zip(weights).map(|(a, w)| a / w).collect(),
        })
    }

    /// Strong-convexity modulus of `½‖x‖² + ½‖v‖²_*` with respect to the
    /// Euclidean metric on `ℝⁿ × ℝⁿ`.
    pub fn modulus(&self) -> f64 {
        match self {
            DualityMap::Euclidean => 1.0,
            DualityMap::Weighted { weights } => {
                let lo = weights.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = weights.iter().copied().fold(0.0, f64::max);
                lo.min(1.0 / hi)
            }
        }
    }

    /// `‖z‖² + ‖u‖²_* + 2⟨z,u⟩ ≥ 0`, zero exactly when `u = −J(z)`.
    pub fn pairing_defect(&self, z: &[f64], u: &[f64]) -> Result<PairingDefect> {
        self.pairing_defect_with_tol(z, u, EQUALITY_TOL)
    }

    pub fn pairing_defect_with_tol(&self, z: &[f64], u: &[f64], tol: f64) -> Result<PairingDefect> {
        check_dim(z.len(), u.len())?;
        let value = self.norm_sq(z)? + self.dual_norm_sq(u)? + 2.0 * dot(z, u);
        let equality_witness = if value <= tol {
            Some(self.jmap(z)?.into_iter().map(|a| -a).collect())
        } else {
            None
        };
        Ok(PairingDefect {
            value,
            equality_witness,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w41() -> DualityMap {
        DualityMap::weighted(vec![4.0, 1.0]).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(DualityMap::Euclidean.norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(w41().norm(&[1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(w41().norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(DualityMap::Euclidean.norm(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn jmap_examples() {
        assert_eq!(DualityMap::Euclidean.jmap(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(w41().jmap(&[1.0, 1.0]).unwrap(), vec![4.0, 1.0]);
        assert_eq!(w41().jstar(&[4.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn duality_identity_holds() {
        let dm = w41();
        let x = [0.3, -1.7];
        let jx = dm.jmap(&x).unwrap();
        let n2 = dm.norm_sq(&x).unwrap();
        assert!((dot(&x, &jx) - n2).abs() < 1e-12);
        assert!((dm.dual_norm_sq(&jx).unwrap() - n2).abs() < 1e-12);
    }

    #[test]
    fn pairing_defect_examples() {
        let e = DualityMap::Euclidean;
        let d = e.pairing_defect(&[1.0], &[-1.0]).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.equality_witness, Some(vec![-1.0]));
        let d = e.pairing_defect(&[1.0], &[1.0]).unwrap();
        assert_eq!(d.value, 4.0);
        assert!(d.equality_witness.is_none());
        let w = DualityMap::weighted(vec![4.0]).unwrap();
        let d = w.pairing_defect(&[1.0], &[-4.0]).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.equality_witness, Some(vec![-4.0]));
    }

    #[test]
    fn dimension_and_weight_errors() {
        assert!(w41().norm(&[1.0]).is_err());
        assert!(DualityMap::Euclidean.pairing_defect(&[1.0], &[1.0, 2.0]).is_err());
        assert!(DualityMap::weighted(vec![1.0, 0.0]).is_err());
        assert!(DualityMap::weighted(vec![]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&w41()).unwrap();
        assert_eq!(s, r#"{"norm":"weighted","weights":[4.0,1.0]}"#);
        let e: DualityMap = serde_json::from_str(r#"{"norm":"euclidean"}"#).unwrap();
        assert_eq!(e, DualityMap::Euclidean);
    }

    #[test]
    fn modulus_of_weighted_map() {
        assert_eq!(DualityMap::Euclidean.modulus(), 1.0);
        assert_eq!(w41().modulus(), 0.25);
    }
}
