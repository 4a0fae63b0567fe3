use rayon::prelude::*;
use serde::Serialize;

use crate::convex::GridSpec;
use crate::duality::DualityMap;
use crate::error::{check_dim, Result};
use crate::representations::Representative;
use crate::witness::{solve_resolvent_with, ResolventCertificate, SolverOptions};

/// Outcome of [`maximality_probe`].
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub total: usize,
    pub accepted: usize,
    pub fraction: f64,
    /// One certificate per probe, in probe-grid order.
    pub certificates: Vec<ResolventCertificate>,
    /// Probes whose solver run failed outright, with the reason.
    pub errors: Vec<(usize, String)>,
    pub note: &'static str,
}

const PROBE_NOTE: &str =
    "surjectivity of v + J(x) is checked only at the probed v0; this is evidence of maximality, not a proof";

/// Solves `v0 ∈ T(x) + J(x)` for every node `v0` of `probes` and reports the
/// fraction of accepted certificates. A maximal representative reaches 1.
pub fn maximality_probe(
    h: &Representative,
    dm: &DualityMap,
    probes: &GridSpec,
    opts: &SolverOptions,
) -> Result<ProbeReport> {
    check_dim(h.dim(), probes.dim())?;
    let runs: Vec<std::result::Result<ResolventCertificate, String>> = (0..probes.len())
        .into_par_iter()
        .map(|i| solve_resolvent_with(h, dm, &probes.point(i), opts).map_err(|e| e.to_string()))
        .collect();
    let mut certificates = Vec::with_capacity(runs.len());
    let mut errors = Vec::new();
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok(c) => certificates.push(c),
            Err(e) => errors.push((i, e)),
        }
    }
    let accepted = certificates.iter().filter(|c| c.accepted).count();
    let total = probes.len();
    Ok(ProbeReport {
        total,
        accepted,
        fraction: accepted as f64 / total as f64,
        certificates,
        errors,
        note: PROBE_NOTE,
    })
}
