//! Computational convex representations of maximal monotone operators.
//!
//! The crate samples extended-real convex functions on box grids and
//! conjugates them, builds Fitzpatrick functions of finite operator graphs,
//! checks whether a convex function `h` on `X × X*` represents a maximal
//! monotone operator (`h(x,v) ≥ ⟨x,v⟩` and `h*(v,x) ≥ ⟨x,v⟩`), extracts the
//! represented operator `{h = ⟨·,·⟩}`, and computes resolvents of `T + J` by
//! minimizing a strongly convex penalty whose optimal value is zero.
//!
//! Module map:
//!
//! * [`convex`]: grids, discrete Legendre–Fenchel transforms, max-affine
//!   functions and their exact conjugates.
//! * [`duality`]: smooth norms on `ℝⁿ` and their duality maps `J`, `J_*`.
//! * [`operators`]: operator graphs, an analytic catalog, monotonicity and
//!   maximality probes.
//! * [`representations`]: Fitzpatrick functions, the `J`-transform and
//!   membership/minimality checks.
//! * [`witness`]: representative verification, operator extraction and the
//!   resolvent solver with its certificate.
//! * [`cli`]: batch front end used by the `monorep` binary.

pub mod cli;
pub mod convex;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod representations;
pub mod witness;

pub use error::{Error, Result};

/// Absolute tolerance used when comparing pairings that sit exactly on the
/// monotonicity boundary.
pub const MONOTONICITY_TOL: f64 = 1e-12;
