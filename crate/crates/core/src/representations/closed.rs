//! Closed-form representatives.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::domain::Domain;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, mat_vec, matrix_from_rows, min_sym_eigenvalue, sym_pinv};
use crate::operators::AnalyticOperator;

/// Tolerance for "v equals x" style tests in indicator representatives.
const ON_SET_TOL: f64 = 1e-12;
/// Relative tolerance for the solvability test of the stationarity system.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Fitzpatrick function of an affine monotone map `T(y) = My + c`:
///
/// ```text
/// φ(x, v) = sup_y ⟨x − y, My + c − v⟩ + ⟨x, v⟩
/// ```
///
/// The inner objective is a concave quadratic in `y`; its stationarity system
/// `(M + Mᵀ) y = Mᵀx + v − c` decides finiteness, and any solution gives the
/// value. The gradient at `(x, v)` is `(T(y), y)` for the maximizer `y`.
#[derive(Debug, Clone)]
pub struct AffinePhi {
    m: DMatrix<f64>,
    c: Vec<f64>,
    s_pinv: DMatrix<f64>,
    kernel: DMatrix<f64>,
    rank: usize,
}

impl AffinePhi {
    pub fn new(m: DMatrix<f64>, c: Vec<f64>) -> Result<Self> {
        check_dim(m.nrows(), m.ncols())?;
        check_dim(m.nrows(), c.len())?;
        let scale = m.amax().max(1.0);
        if min_sym_eigenvalue(&m) < -1e-12 * scale {
            return Err(Error::Precondition("Fitzpatrick closed form requires A + Aᵀ ⪰ 0".into()));
        }
        let s = &m + m.transpose();
        let sp = sym_pinv(&s, 1e-12);
        Ok(AffinePhi {
            m,
            c,
            s_pinv: sp.pinv,
            kernel: sp.kernel_projector,
            rank: sp.rank,
        })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Maximizer `y`, or `None` when the stationarity system is inconsistent.
    fn maximizer(&self, x: &[f64], v: &[f64]) -> Option<Vec<f64>> {
        let w: Vec<f64> = v.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        let mt_x = mat_vec(&self.m.transpose(), x);
        let rhs: Vec<f64> = mt_x.iter().zip(&w).map(|(a, b)| a + b).collect();
        if self.rank < self.dim() {
            let off = mat_vec(&self.kernel, &rhs);
            let scale = 1.0 + rhs.iter().fold(0.0_f64, |s, a| s.max(a.abs()));
            if off.iter().any(|a| a.abs() > CONSISTENCY_TOL * scale) {
                return None;
            }
        }
        Some(mat_vec(&self.s_pinv, &rhs))
    }

    pub fn eval(&self, x: &[f64], v: &[f64]) -> f64 {
        match self.maximizer(x, v) {
            None => f64::INFINITY,
            Some(y) => {
                let my = mat_vec(&self.m, &y);
                let mut inner = 0.0;
                for i in 0..x.len() {
                    inner += (x[i] - y[i]) * (my[i] + self.c[i] - v[i]);
                }
                inner + dot(x, v)
            }
        }
    }

    pub fn gradient(&self, x: &[f64], v: &[f64]) -> Option<Vec<f64>> {
        let y = self.maximizer(x, v)?;
        let my = mat_vec(&self.m, &y);
        let mut g: Vec<f64> = my.iter().zip(&self.c).map(|(a, b)| a + b).collect();
        g.extend(y);
        Some(g)
    }

    /// `{(x, v) : P_ker (Mᵀx + v − c) = 0}`, the whole space when `M + Mᵀ ≻ 0`.
    pub fn domain(&self) -> Domain {
        let n = self.dim();
        if self.rank == n {
            return Domain::Whole;
        }
        let mut con = DMatrix::zeros(n, 2 * n);
        con.view_mut((0, 0), (n, n))
            .copy_from(&(&self.kernel * self.m.transpose()));
        con.view_mut((0, n), (n, n)).copy_from(&self.kernel);
        let rhs = &self.kernel * DVector::from_column_slice(&self.c);
        Domain::affine(con, rhs)
    }
}

/// Fitzpatrick function of `T(x) = Ax` evaluated exactly; `+∞` off its domain.
pub fn fitzpatrick_linear_closed_form(a: &[Vec<f64>], x: &[f64], v: &[f64]) -> Result<f64> {
    let m = matrix_from_rows(a)?;
    check_dim(m.nrows(), x.len())?;
    check_dim(m.nrows(), v.len())?;
    let n = m.nrows();
    Ok(AffinePhi::new(m, vec![0.0; n])?.eval(x, v))
}

/// Catalog identifiers of closed-form representatives, as they appear in
/// representative JSON (`{"form":"closed","id":...}`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum ClosedSpec {
    /// `‖x + v‖² / 4`, the Fitzpatrick function of the identity.
    #[serde(rename = "identity-phi")]
    IdentityPhi {
        #[serde(default = "one")]
        dim: usize,
    },
    /// `⟨x, v⟩ + ι{v = x}`, the largest representative of the identity.
    #[serde(rename = "identity-indicator")]
    IdentityIndicator {
        #[serde(default = "one")]
        dim: usize,
    },
    /// Fitzpatrick function of a catalog operator.
    #[serde(rename = "phi")]
    OperatorPhi { operator: AnalyticOperator },
    /// `⟨x, v⟩` at a single pair, `+∞` elsewhere.
    #[serde(rename = "point-indicator")]
    PointIndicator { x: Vec<f64>, v: Vec<f64> },
    #[serde(rename = "constant")]
    Constant {
        #[serde(default = "one")]
        dim: usize,
        value: f64,
    },
}

fn one() -> usize {
    1
}

/// Evaluable closed form built from a [`ClosedSpec`].
#[derive(Debug, Clone)]
pub enum ClosedForm {
    IdentityPhi { dim: usize },
    IdentityIndicator { dim: usize },
    AffinePhi { op: AnalyticOperator, phi: AffinePhi },
    /// `ι_box(x) + σ_box(v)`, the Fitzpatrick function of the box normal cone.
    NormalConePhi { lower: Vec<f64>, upper: Vec<f64> },
    PointIndicator { x: Vec<f64>, v: Vec<f64> },
    Constant { dim: usize, value: f64 },
}

impl ClosedForm {
    pub fn from_spec(spec: &ClosedSpec) -> Result<Self> {
        let positive = |d: usize| {
            if d == 0 {
                Err(Error::InvalidInput("closed form dimension must be positive".into()))
            } else {
                Ok(d)
            }
        };
        Ok(match spec {
            ClosedSpec::IdentityPhi { dim } => ClosedForm::IdentityPhi { dim: positive(*dim)? },
            ClosedSpec::IdentityIndicator { dim } => ClosedForm::IdentityIndicator { dim: positive(*dim)? },
            ClosedSpec::OperatorPhi { operator } => Self::phi_of(operator)?,
            ClosedSpec::PointIndicator { x, v } => {
                positive(x.len())?;
                check_dim(x.len(), v.len())?;
                ClosedForm::PointIndicator { x: x.clone(), v: v.clone() }
            }
            ClosedSpec::Constant { dim, value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidInput("constant must be finite".into()));
                }
                ClosedForm::Constant { dim: positive(*dim)?, value: *value }
            }
        })
    }

    /// Fitzpatrick function of a catalog operator.
    pub fn phi_of(op: &AnalyticOperator) -> Result<Self> {
        op.validate()?;
        Ok(match op {
            AnalyticOperator::NormalConeBox { lower, upper } => ClosedForm::NormalConePhi {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            _ => {
                let (m, c) = op.affine_parts().expect("single-valued kind");
                ClosedForm::AffinePhi {
                    op: op.clone(),
                    phi: AffinePhi::new(m, c)?,
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ClosedForm::IdentityPhi { dim }
            | ClosedForm::IdentityIndicator { dim }
            | ClosedForm::Constant { dim, .. } => *dim,
            ClosedForm::AffinePhi { phi, .. } => phi.dim(),
            ClosedForm::NormalConePhi { lower, .. } => lower.len(),
            ClosedForm::PointIndicator { x, .. } => x.len(),
        }
    }

    pub fn eval(&self, x: &[f64], v: &[f64]) -> f64 {
        match self {
            ClosedForm::IdentityPhi { .. } => x.iter().zip(v).map(|(a, b)| (a + b) * (a + b)).sum::<f64>() / 4.0,
            ClosedForm::IdentityIndicator { .. } => {
                if near(x, v) {
                    dot(x, v)
                } else {
                    f64::INFINITY
                }
            }
            ClosedForm::AffinePhi { phi, .. } => phi.eval(x, v),
            ClosedForm::NormalConePhi { lower, upper } => {
                let mut acc = 0.0;
                for i in 0..x.len() {
                    if x[i] < lower[i] - ON_SET_TOL || x[i] > upper[i] + ON_SET_TOL {
                        return f64::INFINITY;
                    }
                    acc += (lower[i] * v[i]).max(upper[i] * v[i]);
                }
                acc
            }
            ClosedForm::PointIndicator { x: px, v: pv } => {
                if near(x, px) && near(v, pv) {
                    dot(x, v)
                } else {
                    f64::INFINITY
                }
            }
            ClosedForm::Constant { value, .. } => *value,
        }
    }

    /// A subgradient at `(x, v)`. Where the subdifferential is not a
    /// singleton, the element closest to `−smooth` is preferred so that the
    /// sum with the smooth part of the solver objective is small.
    pub fn subgradient(&self, x: &[f64], v: &[f64], smooth: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self {
            ClosedForm::IdentityPhi { .. } => {
                let half: Vec<f64> = x.iter().zip(v).map(|(a, b)| (a + b) / 2.0).collect();
                let mut g = half.clone();
                g.extend(half);
                g
            }
            ClosedForm::IdentityIndicator { .. } => {
                let mut g = v.to_vec();
                g.extend_from_slice(x);
                g
            }
            ClosedForm::AffinePhi { phi, .. } => phi.gradient(x, v).unwrap_or_else(|| vec![0.0; 2 * n]),
            ClosedForm::NormalConePhi { lower, upper } => {
                let mut g = vec![0.0; 2 * n];
                for i in 0..n {
                    g[n + i] = if v[i] > 0.0 {
                        upper[i]
                    } else if v[i] < 0.0 {
                        lower[i]
                    } else {
                        (-smooth[n + i]).clamp(lower[i], upper[i])
                    };
                }
                g
            }
            ClosedForm::PointIndicator { .. } | ClosedForm::Constant { .. } => vec![0.0; 2 * n],
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ClosedForm::IdentityPhi { .. } | ClosedForm::Constant { .. } => Domain::Whole,
            ClosedForm::IdentityIndicator { dim } => {
                let n = *dim;
                let mut m = DMatrix::zeros(n, 2 * n);
                for i in 0..n {
                    m[(i, i)] = 1.0;
                    m[(i, n + i)] = -1.0;
                }
                Domain::affine(m, DVector::zeros(n))
            }
            ClosedForm::AffinePhi { phi, .. } => phi.domain(),
            ClosedForm::NormalConePhi { lower, upper } => Domain::PrimalBox {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            ClosedForm::PointIndicator { x, v } => {
                let mut z = x.clone();
                z.extend_from_slice(v);
                Domain::Point(z)
            }
        }
    }
}

fn near(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(p, q)| (p - q).abs() <= ON_SET_TOL * (1.0 + p.abs().max(q.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn linear_closed_form_examples() {
        assert!((fitzpatrick_linear_closed_form(&[vec![1.0]], &[1.0], &[1.0]).unwrap() - 1.0).abs() < 1e-15);
        let r = AnalyticOperator::rotation(FRAC_PI_2).unwrap();
        let (m, _) = r.affine_parts().unwrap();
        let rows = crate::linalg::matrix_to_rows(&m);
        let on = fitzpatrick_linear_closed_form(&rows, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(on.abs() < 1e-15);
        let off = fitzpatrick_linear_closed_form(&rows, &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(off.is_infinite());
        assert!(fitzpatrick_linear_closed_form(&[vec![-1.0]], &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn identity_forms_agree_with_formula() {
        let phi = ClosedForm::phi_of(&AnalyticOperator::linear(vec![vec![1.0]]).unwrap()).unwrap();
        let id = ClosedForm::IdentityPhi { dim: 1 };
        for &(x, v) in &[(1.0, 1.0), (1.0, -1.0), (0.3, 2.0), (-1.5, 0.25)] {
            let expect = (x + v) * (x + v) / 4.0;
            assert!((phi.eval(&[x], &[v]) - expect).abs() < 1e-14);
            assert!((id.eval(&[x], &[v]) - expect).abs() < 1e-15);
        }
        let ind = ClosedForm::IdentityIndicator { dim: 1 };
        assert_eq!(ind.eval(&[2.0], &[2.0]), 4.0);
        assert!(ind.eval(&[2.0], &[2.1]).is_infinite());
    }

    #[test]
    fn affine_phi_with_shift() {
        // T(y) = 3y + 0.5: φ(x, v) = (3x + v − 0.5)²/12 + 0.5x
        let op = AnalyticOperator::subdiff_quadratic(vec![vec![3.0]], vec![0.5]).unwrap();
        let phi = ClosedForm::phi_of(&op).unwrap();
        for &(x, v) in &[(0.2, 1.0), (-1.0, 0.0), (0.7, -2.0)] {
            let s: f64 = 3.0 * x + v - 0.5;
            let expect = s * s / 12.0 + 0.5 * x;
            assert!((phi.eval(&[x], &[v]) - expect).abs() < 1e-13);
        }
        // on the graph the gap vanishes
        assert!((phi.eval(&[0.4], &[1.7]) - 0.4 * 1.7).abs() < 1e-14);
    }

    #[test]
    fn normal_cone_phi_is_indicator_plus_support() {
        let op = AnalyticOperator::normal_cone_box(vec![0.0], vec![1.0]).unwrap();
        let phi = ClosedForm::phi_of(&op).unwrap();
        assert_eq!(phi.eval(&[0.5], &[2.0]), 2.0);
        assert_eq!(phi.eval(&[0.5], &[-2.0]), 0.0);
        assert!(phi.eval(&[1.5], &[0.0]).is_infinite());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let op = AnalyticOperator::linear(vec![vec![2.0, 1.0], vec![-1.0, 1.0]]).unwrap();
        let phi = ClosedForm::phi_of(&op).unwrap();
        let (x, v) = ([0.3, -0.2], [0.5, 0.9]);
        let g = phi.subgradient(&x, &v, &[0.0; 4]);
        let h = 1e-6;
        let mut z = [x[0], x[1], v[0], v[1]];
        for k in 0..4 {
            let base = z[k];
            z[k] = base + h;
            let up = phi.eval(&z[..2], &z[2..]);
            z[k] = base - h;
            let dn = phi.eval(&z[..2], &z[2..]);
            z[k] = base;
            assert!(((up - dn) / (2.0 * h) - g[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn spec_json_ids() {
        let s: ClosedSpec = serde_json::from_str(r#"{"id":"identity-phi"}"#).unwrap();
        assert_eq!(s, ClosedSpec::IdentityPhi { dim: 1 });
        let s: ClosedSpec = serde_json::from_str(r#"{"id":"phi","operator":{"kind":"rotation2d","theta":1.0}}"#).unwrap();
        assert_eq!(ClosedForm::from_spec(&s).unwrap().dim(), 2);
        assert!(serde_json::from_str::<ClosedSpec>(r#"{"id":"nope"}"#).is_err());
    }
}
