use serde::{Deserialize, Serialize};

use crate::duality::DualityMap;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2};
use crate::representations::{Domain, Representative};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_BUDGET: usize = 200_000;

/// Iterations without improvement of the best objective after which an
/// accepted run stops; the window grows to half the iterations done so far.
const STALL_ITERS: usize = 2_000;
/// Step halvings tried before a step into `h = +∞` is abandoned.
const WALL_HALVINGS: usize = 40;

/// `½‖v − v0‖²_* + ½‖x‖² − ⟨v0, x⟩ + h(x, v)`.
pub fn phi_objective(h: &Representative, dm: &DualityMap, v0: &[f64], x: &[f64], v: &[f64]) -> Result<f64> {
    let n = h.dim();
    check_dim(n, v0.len())?;
    check_dim(n, x.len())?;
    check_dim(n, v.len())?;
    let w: Vec<f64> = v.iter().zip(v0).map(|(a, b)| a - b).collect();
    let hv = h.eval_unchecked(x, v);
    if hv.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(0.5 * dm.dual_norm_sq(&w)? + 0.5 * dm.norm_sq(x)? - dot(v0, x) + hv)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    /// `J_*(v − v0) + x`
    pub r: Vec<f64>,
    /// `v − v0 + J(x)`
    pub rho: Vec<f64>,
    /// `⟨r, ρ⟩`
    pub c: f64,
    /// `½ · pairing_defect(x, v − v0)`
    pub primal_half: f64,
    /// `½ · pairing_defect(J_*(v − v0), J(x))`
    pub dual_half: f64,
}

/// `r`, `ρ` and `C = ⟨r, ρ⟩ = primal_half + dual_half ≥ 0`; `C = 0` exactly
/// when `v − v0 = −J(x)`.
pub fn residuals(dm: &DualityMap, x: &[f64], v: &[f64], v0: &[f64]) -> Result<Residuals> {
    check_dim(x.len(), v.len())?;
    check_dim(x.len(), v0.len())?;
    let w: Vec<f64> = v.iter().zip(v0).map(|(a, b)| a - b).collect();
    let jx = dm.jmap(x)?;
    let jsw = dm.jstar(&w)?;
    let r: Vec<f64> = jsw.iter().zip(x).map(|(a, b)| a + b).collect();
    let rho: Vec<f64> = w.iter().zip(&jx).map(|(a, b)| a + b).collect();
    let c = dot(&r, &rho);
    let primal_half = 0.5 * dm.pairing_defect(x, &w)?.value;
    let dual_half = 0.5 * dm.pairing_defect(&jsw, &jx)?.value;
    Ok(Residuals {
        r,
        rho,
        c,
        primal_half,
        dual_half,
    })
}

/// Step-size rule of the projected subgradient method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    /// `t = Φ / ‖g‖²`, using that the minimum of the objective is 0 for a
    /// representative. On coordinate-wise domains the quadratic part is
    /// handled by its proximal map and `t` is at least `2/(μ(k+1))`.
    Polyak,
    /// `t = 2 / (μ(k+1))` with iterates averaged using weights `k`.
    Averaged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub budget: usize,
    pub step: StepRule,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
            step: StepRule::Averaged,
        }
    }
}

impl SolverOptions {
    pub fn new(tol: f64, budget: usize) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
        }
        if budget == 0 {
            return Err(Error::InvalidInput("budget must be positive".into()));
        }
        Ok(SolverOptions {
            tol,
            budget,
            step: StepRule::Averaged,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventCertificate {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub v0: Vec<f64>,
    /// `h(x,v) − ⟨x,v⟩`
    pub gap: f64,
    /// `‖v + J(x) − v0‖_*`
    pub fixedpoint_residual: f64,
    #[serde(rename = "C_value")]
    pub c_value: f64,
    pub iterations: usize,
    pub accepted: bool,
    /// `sqrt(2Φ/μ)`: bound on the distance to the exact minimizer, valid
    /// when `h ≥ ⟨·,·⟩` everywhere.
    pub distance_bound: f64,
}

/// [`solve_resolvent_with`] with the default (averaged) step rule.
pub fn solve_resolvent(
    h: &Representative,
    dm: &DualityMap,
    v0: &[f64],
    tol: f64,
    budget: usize,
) -> Result<ResolventCertificate> {
    solve_resolvent_with(h, dm, v0, &SolverOptions::new(tol, budget)?)
}

struct Problem<'a> {
    h: &'a Representative,
    dm: &'a DualityMap,
    v0: &'a [f64],
    domain: Domain,
    n: usize,
}

impl Problem<'_> {
    fn value(&self, z: &[f64]) -> f64 {
        let n = self.n;
        let hv = self.h.eval_unchecked(&z[..n], &z[n..]);
        if hv.is_infinite() {
            return f64::INFINITY;
        }
        let w: Vec<f64> = z[n..].iter().zip(self.v0).map(|(a, b)| a - b).collect();
        // dimensions were checked on entry
        0.5 * self.dm.dual_norm_sq(&w).unwrap() + 0.5 * self.dm.norm_sq(&z[..n]).unwrap() - dot(self.v0, &z[..n]) + hv
    }

    /// Gradient of the quadratic part and a subgradient of `h`.
    fn subgradients(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let w: Vec<f64> = z[n..].iter().zip(self.v0).map(|(a, b)| a - b).collect();
        let mut g: Vec<f64> = self
            .dm
            .jmap(&z[..n])
            .unwrap()
            .iter()
            .zip(self.v0)
            .map(|(a, b)| a - b)
            .collect();
        g.extend(self.dm.jstar(&w).unwrap());
        let gh = self.h.subgradient(&z[..n], &z[n..], &g);
        (g, gh)
    }

    /// Proximal map of `t` times the quadratic part, which is diagonal.
    fn prox_quadratic(&self, y: &[f64], t: f64) -> Vec<f64> {
        let n = self.n;
        let weights = match self.dm {
            DualityMap::Euclidean => vec![1.0; n],
            DualityMap::Weighted { weights } => weights.clone(),
        };
        let mut z = Vec::with_capacity(2 * n);
        for i in 0..n {
            z.push((y[i] + t * self.v0[i]) / (1.0 + t * weights[i]));
        }
        for i in 0..n {
            z.push((y[n + i] + t * self.v0[i] / weights[i]) / (1.0 + t / weights[i]));
        }
        z
    }

    fn certificate(&self, z: &[f64], iterations: usize, tol: f64) -> ResolventCertificate {
        let n = self.n;
        let (x, v) = (z[..n].to_vec(), z[n..].to_vec());
        let gap = self.h.eval_unchecked(&x, &v) - dot(&x, &v);
        let fp: Vec<f64> = v
            .iter()
            .zip(self.dm.jmap(&x).unwrap())
            .zip(self.v0)
            .map(|((a, b), c)| a + b - c)
            .collect();
        let fixedpoint_residual = self.dm.dual_norm(&fp).unwrap();
        let c_value = residuals(self.dm, &x, &v, self.v0).unwrap().c;
        let phi = self.value(z).max(0.0);
        ResolventCertificate {
            x,
            v,
            v0: self.v0.to_vec(),
            gap,
            fixedpoint_residual,
            c_value,
            iterations,
            accepted: gap <= tol && gap >= -tol && fixedpoint_residual <= tol,
            distance_bound: (2.0 * phi / self.dm.modulus()).sqrt(),
        }
    }

    /// Deterministic start: `(J_*(v0)/2, v0/2)`, then the origin, each
    /// projected onto the domain, then the nearest finite node of a grid.
    fn start(&self) -> Result<Vec<f64>> {
        let mut z = self.dm.jstar(self.v0)?.iter().map(|a| a / 2.0).collect::<Vec<_>>();
        z.extend(self.v0.iter().map(|a| a / 2.0));
        let candidates = [z.clone(), self.domain.project(&z), self.domain.project(&vec![0.0; 2 * self.n])];
        for c in candidates {
            if self.value(&c).is_finite() {
                return Ok(c);
            }
        }
        if let Some(g) = self.h.as_grid() {
            let spec = g.spec();
            let target = spec.clamp(&z);
            let best = (0..spec.len())
                .filter(|&i| g.at(i).is_finite())
                .map(|i| {
                    let p = spec.point(i);
                    let d: f64 = p.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum();
                    (d, i)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((_, i)) = best {
                return Ok(spec.point(i));
            }
        }
        Err(Error::InfeasibleStart)
    }
}

/// Minimizes `Φ(x,v) = ½‖v − v0‖²_* + ½‖x‖² − ⟨v0,x⟩ + h(x,v)` by a projected
/// subgradient method and certifies the result.
///
/// The quadratic part is strongly convex, so the minimizer `(x, v)` is unique;
/// for a representative it satisfies `h(x,v) = ⟨x,v⟩` and `v + J(x) = v0`.
/// The run is accepted when both the gap and the fixed-point residual are at
/// most `tol`. A run that exhausts the budget returns a non-accepted
/// certificate rather than an error.
pub fn solve_resolvent_with(
    h: &Representative,
    dm: &DualityMap,
    v0: &[f64],
    opts: &SolverOptions,
) -> Result<ResolventCertificate> {
    let n = h.dim();
    check_dim(n, v0.len())?;
    if let Some(d) = dm.dim() {
        check_dim(d, n)?;
    }
    if v0.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidInput("v0 must be finite".into()));
    }
    let p = Problem {
        h,
        dm,
        v0,
        domain: h.domain(),
        n,
    };
    let mu = dm.modulus();
    let mut z = p.start()?;
    let mut fz = p.value(&z);

    let mut best = (fz, z.clone(), 0usize);
    let mut avg = z.clone();
    let mut avg_weight = 0.0;
    let mut last_improvement = 0usize;

    let mut k = 0usize;
    while k < opts.budget {
        let cert = p.certificate(&best.1, k, opts.tol);
        if cert.accepted && (cert.distance_bound <= opts.tol || k - last_improvement >= STALL_ITERS.max(k / 2)) {
            return Ok(cert);
        }
        k += 1;
        let (gq, gh) = p.subgradients(&z);
        // min-norm element of g + N_D(z): the tangent part of the step
        let neg: Vec<f64> = gq.iter().zip(&gh).map(|(a, b)| -a - b).collect();
        let g: Vec<f64> = p.domain.tangent(&z, &neg).iter().map(|a| -a).collect();
        let gg = dot(&g, &g);
        if gg == 0.0 {
            break;
        }
        let diminishing = 2.0 / (mu * (k + 1) as f64);
        let polyak = if fz > 0.0 { fz / gg } else { 0.0 };
        // On coordinate-wise domains the quadratic part is taken implicitly,
        // which keeps the smooth directions contracting while `h` is kinked.
        let implicit = opts.step == StepRule::Polyak && p.domain.is_separable();
        let mut t = match opts.step {
            StepRule::Polyak if implicit => polyak.max(diminishing),
            StepRule::Polyak if fz > 0.0 => polyak,
            StepRule::Polyak => 1.0 / (mu * k as f64),
            StepRule::Averaged => diminishing,
        };
        let mut next = None;
        for _ in 0..WALL_HALVINGS {
            let trial: Vec<f64> = if implicit {
                let y: Vec<f64> = z.iter().zip(&gh).map(|(a, b)| a - t * b).collect();
                p.prox_quadratic(&y, t)
            } else {
                z.iter().zip(&g).map(|(a, b)| a - t * b).collect()
            };
            let trial = p.domain.project(&trial);
            let ft = p.value(&trial);
            if ft.is_finite() {
                next = Some((trial, ft));
                break;
            }
            t /= 2.0;
        }
        let Some((znew, fnew)) = next else {
            break;
        };
        if norm2(&znew.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>()) == 0.0 {
            // projection undoes the step: no descent is possible from here
            break;
        }
        z = znew;
        fz = fnew;
        if opts.step == StepRule::Averaged {
            let w = k as f64;
            avg_weight += w;
            for (a, b) in avg.iter_mut().zip(&z) {
                *a += (w / avg_weight) * (b - *a);
            }
            let favg = p.value(&avg);
            if favg < best.0 {
                best = (favg, avg.clone(), k);
                last_improvement = k;
            }
        }
        if fz < best.0 {
            best = (fz, z.clone(), k);
            last_improvement = k;
        }
    }
    Ok(p.certificate(&best.1, k, opts.tol))
}
