//! Small dense helpers shared across modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Build a square matrix from row vectors.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput("matrix has no rows".into()));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::InvalidInput(format!(
                "matrix row {i} has length {}, expected {n}",
                r.len()
            )));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("matrix row {i} has a non-finite entry")));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Smallest eigenvalue of the symmetric part `(M + Mᵀ)/2`.
pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Eigen-based pseudo-inverse of a symmetric matrix together with the
/// orthogonal projector onto its kernel. Eigenvalues below
/// `rel_tol · max(1, ‖S‖)` count as zero.
pub struct SymPinv {
    pub pinv: DMatrix<f64>,
    pub kernel_projector: DMatrix<f64>,
    pub rank: usize,
}

pub fn sym_pinv(s: &DMatrix<f64>, rel_tol: f64) -> SymPinv {
    let n = s.nrows();
    let eig = s.clone().symmetric_eigen();
    let scale = eig
        .eigenvalues
        .iter()
        .fold(1.0_f64, |acc, e| acc.max(e.abs()));
    let cut = rel_tol * scale;
    let mut pinv = DMatrix::zeros(n, n);
    let mut kernel = DMatrix::zeros(n, n);
    let mut rank = 0;
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let q = eig.eigenvectors.column(k);
        let outer = q * q.transpose();
        if lam.abs() > cut {
            pinv += outer / lam;
            rank += 1;
        } else {
            kernel += outer;
        }
    }
    SymPinv {
        pinv,
        kernel_projector: kernel,
        rank,
    }
}
