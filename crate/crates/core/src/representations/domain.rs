//! Closed convex sets containing the effective domain of a representative,
//! with Euclidean projections. The resolvent solver keeps its iterates inside
//! them.

use nalgebra::{DMatrix, DVector};

/// A closed convex subset of `ℝⁿ × ℝⁿ`, points written `z = (x, v)`.
#[derive(Debug, Clone)]
pub enum Domain {
    Whole,
    /// `{z : Mz = c}`; `pinv` is the Moore–Penrose inverse of `M`.
    Affine {
        m: DMatrix<f64>,
        c: DVector<f64>,
        pinv: DMatrix<f64>,
    },
    /// `x ∈ [lower, upper]`, `v` free.
    PrimalBox { lower: Vec<f64>, upper: Vec<f64> },
    /// `z ∈ [lower, upper]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Point(Vec<f64>),
    Intersection(Vec<Domain>),
}

/// Sweeps of Dykstra's algorithm used for intersections.
const DYKSTRA_SWEEPS: usize = 10_000;

impl Domain {
    pub fn affine(m: DMatrix<f64>, c: DVector<f64>) -> Domain {
        let pinv = m
            .clone()
            .pseudo_inverse(1e-12)
            .expect("non-negative pseudo-inverse threshold");
        Domain::Affine { m, c, pinv }
    }

    /// Intersection that drops whole-space factors and flattens nesting.
    pub fn intersect(parts: Vec<Domain>) -> Domain {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Domain::Whole => {}
                Domain::Intersection(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Domain::Whole,
            1 => flat.pop().unwrap(),
            _ => Domain::Intersection(flat),
        }
    }

    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        match self {
            Domain::Whole => z.to_vec(),
            Domain::Affine { m, c, pinv } => {
                let zv = DVector::from_column_slice(z);
                let r = m * &zv - c;
                (zv - pinv * r).as_slice().to_vec()
            }
            Domain::PrimalBox { lower, upper } => {
                let n = lower.len();
                z.iter()
                    .enumerate()
                    .map(|(i, &a)| if i < n { a.clamp(lower[i], upper[i]) } else { a })
                    .collect()
            }
            Domain::Box { lower, upper } => z
                .iter()
                .enumerate()
                .map(|(i, &a)| a.clamp(lower[i], upper[i]))
                .collect(),
            Domain::Point(p) => p.clone(),
            Domain::Intersection(parts) => dykstra(parts, z, |d, y| d.project(y)),
        }
    }

    /// Coordinate-wise sets, for which projecting after a separable proximal
    /// step is exact.
    pub fn is_separable(&self) -> bool {
        matches!(self, Domain::Whole | Domain::PrimalBox { .. } | Domain::Box { .. } | Domain::Point(_))
    }

    /// Projection of the direction `d` onto the tangent cone at `z ∈ D`.
    pub fn tangent(&self, z: &[f64], d: &[f64]) -> Vec<f64> {
        let clip = |i: usize, lo: f64, hi: f64, di: f64| {
            let at_lo = di < 0.0 && z[i] <= lo + ACTIVE_TOL * (1.0 + lo.abs());
            let at_hi = di > 0.0 && z[i] >= hi - ACTIVE_TOL * (1.0 + hi.abs());
            if at_lo || at_hi {
                0.0
            } else {
                di
            }
        };
        match self {
            Domain::Whole => d.to_vec(),
            Domain::Affine { m, pinv, .. } => {
                let dv = DVector::from_column_slice(d);
                let r = m * &dv;
                (dv - pinv * r).as_slice().to_vec()
            }
            Domain::PrimalBox { lower, upper } => d
                .iter()
                .enumerate()
                .map(|(i, &di)| if i < lower.len() { clip(i, lower[i], upper[i], di) } else { di })
                .collect(),
            Domain::Box { lower, upper } => d
                .iter()
                .enumerate()
                .map(|(i, &di)| clip(i, lower[i], upper[i], di))
                .collect(),
            Domain::Point(_) => vec![0.0; d.len()],
            Domain::Intersection(parts) => dykstra(parts, d, |p, y| p.tangent(z, y)),
        }
    }
}

/// Relative distance to a bound under which a coordinate counts as active.
const ACTIVE_TOL: f64 = 1e-12;

fn dykstra(parts: &[Domain], z: &[f64], proj: impl Fn(&Domain, &[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut x = z.to_vec();
    let mut incr = vec![vec![0.0; z.len()]; parts.len()];
    for _ in 0..DYKSTRA_SWEEPS {
        let mut moved: f64 = 0.0;
        for (k, d) in parts.iter().enumerate() {
            let y: Vec<f64> = x.iter().zip(&incr[k]).map(|(a, b)| a + b).collect();
            let p = proj(d, &y);
            let next: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
            for (a, b) in next.iter().zip(&incr[k]).chain(p.iter().zip(&x)) {
                moved = moved.max((a - b).abs());
            }
            incr[k] = next;
            x = p;
        }
        if moved < 1e-15 {
            break;
        }
    }
    x
}
