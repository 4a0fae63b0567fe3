//! Representative checks, operator extraction and resolvent certificates.
//!
//! For `h` with `h(x,v) ≥ ⟨x,v⟩` and `h*(v,x) ≥ ⟨x,v⟩`, the set
//! `T = {h = ⟨·,·⟩}` is maximal monotone, and for every `v0` the minimizer of
//! `½‖v − v0‖²_* + ½‖x‖² − ⟨v0, x⟩ + h(x, v)` lies on `T` with
//! `v + J(x) = v0`.

mod solver;
mod verify;

pub use solver::{
    phi_objective, residuals, solve_resolvent, solve_resolvent_with, ResolventCertificate, Residuals, SolverOptions,
    StepRule, DEFAULT_BUDGET, DEFAULT_TOL,
};
pub use verify::{extract_operator, verify_representative, GapReport, VerifyVerdict};
