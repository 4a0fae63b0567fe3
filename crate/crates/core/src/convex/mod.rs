//! Extended-real convex functions on grids and as max-affine collections.

pub mod conjugate;
pub mod grid;
pub mod io;
pub mod max_affine;
pub mod simplex;

pub use conjugate::{biconjugate, conjugate_1d, conjugate_nd, conjugate_nd_with, Kernel};
pub use grid::{GridFn, GridSpec};
pub use max_affine::{AffinePiece, MaxAffineFn};

use crate::error::Result;

/// `max_j ⟨slope_j, p⟩ + offset_j`.
pub fn eval_max_affine(m: &MaxAffineFn, p: &[f64]) -> Result<f64> {
    m.eval(p)
}

/// Exact conjugate of a max-affine function at `q` (`+∞` off the slope hull).
pub fn conjugate_max_affine(m: &MaxAffineFn, q: &[f64]) -> Result<f64> {
    m.conjugate_at(q)
}
