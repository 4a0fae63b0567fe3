//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use monorep::convex::{GridFn, GridSpec};
use monorep::operators::OperatorGraph;
use rand::Rng;

/// `max_x ⟨s, x⟩ − f(x)` by a direct double loop over all node pairs.
pub fn brute_conjugate(f: &GridFn, dual: &GridSpec) -> Vec<f64> {
    let spec = f.spec();
    let primal: Vec<(Vec<f64>, f64)> = (0..spec.len())
        .filter(|&i| f.at(i).is_finite())
        .map(|i| (spec.point(i), f.at(i)))
        .collect();
    (0..dual.len())
        .map(|j| {
            let s = dual.point(j);
            primal
                .iter()
                .map(|(x, fx)| s.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - fx)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// `sup_{(y,u) ∈ G} ⟨x − y, u − v⟩ + ⟨x, v⟩`, written in its defining form.
pub fn brute_fitzpatrick(g: &OperatorGraph, x: &[f64], v: &[f64]) -> f64 {
    let xv: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    g.points()
        .iter()
        .map(|p| {
            let inner: f64 = (0..x.len()).map(|i| (x[i] - p.x[i]) * (p.v[i] - v[i])).sum();
            inner + xv
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn random_spec(rng: &mut impl Rng, dim: usize, max_count: usize) -> GridSpec {
    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    let mut counts = Vec::with_capacity(dim);
    for _ in 0..dim {
        let lo: f64 = rng.gen_range(-3.0..1.0);
        lower.push(lo);
        upper.push(lo + rng.gen_range(0.5..4.0));
        counts.push(rng.gen_range(2..=max_count));
    }
    GridSpec::new(lower, upper, counts).unwrap()
}

/// Random values in `[-5, 5]`, about one in ten replaced by `+∞`, at least
/// one finite.
pub fn random_gridfn(rng: &mut impl Rng, spec: GridSpec) -> GridFn {
    let mut values: Vec<f64> = (0..spec.len())
        .map(|_| {
            if rng.gen_bool(0.1) {
                f64::INFINITY
            } else {
                rng.gen_range(-5.0..5.0)
            }
        })
        .collect();
    let k = rng.gen_range(0..values.len());
    values[k] = rng.gen_range(-5.0..5.0);
    GridFn::new(spec, values).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| if x == y { 0.0 } else { (x - y).abs() })
        .fold(0.0, f64::max)
}
