//! Discrete Legendre–Fenchel transform on box grids.
//!
//! The conjugate of a sampled function is the conjugate of its restriction to
//! the grid, `f*(s) = max_x ⟨s,x⟩ − f(x)` with `x` ranging over grid nodes
//! where `f` is finite. It never exceeds the conjugate of any extension of
//! `f`, so an inequality `f*(s) ≥ c` certified on the grid also holds for the
//! continuous conjugate.
//!
//! The `d`-dimensional transform factorizes: maximizing `Σ sₐxₐ − f(x)` one
//! axis at a time turns it into `d` sweeps of one-dimensional transforms over
//! independent fibers. Fibers are processed in parallel, each sequentially,
//! so results do not depend on the thread count.

use rayon::prelude::*;

use super::grid::{GridFn, GridSpec};
use crate::error::{check_dim, Error, Result};

/// One-dimensional kernel used by the sweeps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Kernel {
    /// `O(N·M)` scan over all primal nodes for every dual node.
    #[default]
    BruteForce,
    /// Upper hull of the points `(xᵢ, −f(xᵢ))` followed by a monotone merge
    /// against the sorted dual nodes, `O(N + M)`.
    LinearTime,
}

/// Conjugate of a one-dimensional grid function onto the `dual` grid.
pub fn conjugate_1d(f: &GridFn, dual: &GridSpec) -> Result<GridFn> {
    check_dim(1, f.spec().dim())?;
    check_dim(1, dual.dim())?;
    conjugate_nd_with(f, dual, Kernel::BruteForce)
}

/// Conjugate of a grid function onto the `dual` grid (same dimension).
pub fn conjugate_nd(f: &GridFn, dual: &GridSpec) -> Result<GridFn> {
    conjugate_nd_with(f, dual, Kernel::BruteForce)
}

pub fn conjugate_nd_with(f: &GridFn, dual: &GridSpec, kernel: Kernel) -> Result<GridFn> {
    check_dim(f.spec().dim(), dual.dim())?;
    dual.validate()?;
    if f.values().iter().all(|v| v.is_infinite()) {
        return Err(Error::NotProper);
    }
    let d = dual.dim();
    // Work with F = -f so that each sweep is a max of (s·x + F).
    let mut work: Vec<f64> = f.values().iter().map(|&v| -v).collect();
    let mut shape: Vec<usize> = f.spec().counts().to_vec();

    for axis in 0..d {
        let xs = f.spec().axis_coords(axis);
        let ss = dual.axis_coords(axis);
        let n_in = shape[axis];
        let n_out = ss.len();
        let inner: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let mut next = vec![0.0; outer * n_out * inner];

        next.par_chunks_mut(n_out * inner)
            .enumerate()
            .for_each(|(o, out_block)| {
                let in_block = &work[o * n_in * inner..(o + 1) * n_in * inner];
                let mut fiber = vec![0.0; n_in];
                let mut result = vec![0.0; n_out];
                for i in 0..inner {
                    for (k, slot) in fiber.iter_mut().enumerate() {
                        *slot = in_block[k * inner + i];
                    }
                    match kernel {
                        Kernel::BruteForce => max_plus_brute(&xs, &fiber, &ss, &mut result),
                        Kernel::LinearTime => max_plus_hull(&xs, &fiber, &ss, &mut result),
                    }
                    for (j, &r) in result.iter().enumerate() {
                        out_block[j * inner + i] = r;
                    }
                }
            });

        shape[axis] = n_out;
        work = next;
    }

    // Properness of f makes every output finite; the guard keeps the
    // GridFn invariant explicit.
    if work.contains(&f64::NEG_INFINITY) {
        return Err(Error::NotProper);
    }
    GridFn::new(dual.clone(), work)
}

/// `out[j] = max_i (s_j·x_i + vals[i])`, skipping `vals[i] = -∞`.
fn max_plus_brute(xs: &[f64], vals: &[f64], ss: &[f64], out: &mut [f64]) {
    for (o, &s) in out.iter_mut().zip(ss) {
        let mut best = f64::NEG_INFINITY;
        for (&x, &v) in xs.iter().zip(vals) {
            if v == f64::NEG_INFINITY {
                continue;
            }
            let cand = s * x + v;
            if cand > best {
                best = cand;
            }
        }
        *o = best;
    }
}

/// Same contract as [`max_plus_brute`]; requires `xs` and `ss` ascending.
fn max_plus_hull(xs: &[f64], vals: &[f64], ss: &[f64], out: &mut [f64]) {
    // upper concave hull of (x, v) by monotone chain
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for (&x, &v) in xs.iter().zip(vals) {
        if v == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (x1, v1) = hull[hull.len() - 2];
            let (x2, v2) = hull[hull.len() - 1];
            // drop the middle point when it lies on or below the chord
            if (v2 - v1) * (x - x1) <= (v - v1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, v));
    }
    if hull.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::NEG_INFINITY);
        return;
    }
    let mut k = 0;
    for (o, &s) in out.iter_mut().zip(ss) {
        while k + 1 < hull.len() && s * hull[k + 1].0 + hull[k + 1].1 >= s * hull[k].0 + hull[k].1 {
            k += 1;
        }
        *o = s * hull[k].0 + hull[k].1;
    }
}

/// `f**` computed on `f`'s own grid (the dual grid is the primal grid).
/// The result lies below `f` and is a fixed point of the operation.
pub fn biconjugate(f: &GridFn) -> Result<GridFn> {
    let fstar = conjugate_nd(f, f.spec())?;
    conjugate_nd(&fstar, f.spec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(values: Vec<f64>) -> GridFn {
        let n = values.len();
        GridFn::new(GridSpec::uniform(1, -1.0, 1.0, n).unwrap(), values).unwrap()
    }

    #[test]
    fn conjugate_of_convex_three_points() {
        // brute force: s=-1 -> max(1-1, 0-0, -1-1) = 0, s=0 -> 0, s=1 -> 0
        let f = line(vec![1.0, 0.0, 1.0]);
        let g = conjugate_1d(&f, f.spec()).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn conjugate_of_zero_at_zero_slope() {
        let f = line(vec![0.0; 3]);
        let dual = GridSpec::uniform(1, -1.0, 1.0, 3).unwrap();
        let g = conjugate_1d(&f, &dual).unwrap();
        assert_eq!(g.values()[1], 0.0);
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let spec = GridSpec::uniform(1, -4.0, 4.0, 801).unwrap();
        let f = GridFn::from_fn(spec, |p| 0.5 * p[0] * p[0]).unwrap();
        let dual = GridSpec::new(vec![0.0], vec![2.0], vec![3]).unwrap();
        let g = conjugate_1d(&f, &dual).unwrap();
        // s = 1 is a grid slope, so the maximizer x = 1 is a node
        assert!((g.values()[1] - 0.5).abs() < 1e-12);
        assert!((g.values()[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_on_square_conjugates_to_box_support() {
        let spec = GridSpec::uniform(2, -1.0, 1.0, 5).unwrap();
        let f = GridFn::from_fn(spec, |_| 0.0).unwrap();
        let dual = GridSpec::uniform(2, 1.0, 2.0, 2).unwrap();
        let g = conjugate_nd(&f, &dual).unwrap();
        assert_eq!(g.values()[0], 2.0);
    }

    #[test]
    fn point_indicator_conjugates_to_zero() {
        let spec = GridSpec::uniform(2, -1.0, 1.0, 3).unwrap();
        let f = GridFn::from_fn(spec.clone(), |p| {
            if p[0] == 0.0 && p[1] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .unwrap();
        let g = conjugate_nd(&f, &spec).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn biconjugate_examples() {
        assert_eq!(biconjugate(&line(vec![0.0, 1.0, 0.0])).unwrap().values(), &[0.0, 0.0, 0.0]);
        assert_eq!(biconjugate(&line(vec![1.0, 0.0, 1.0])).unwrap().values(), &[1.0, 0.0, 1.0]);
        assert_eq!(biconjugate(&line(vec![0.0; 3])).unwrap().values(), &[0.0; 3]);
    }

    #[test]
    fn improper_and_mismatched_inputs_are_rejected() {
        let f = line(vec![0.0, 1.0]);
        let dual2 = GridSpec::uniform(2, 0.0, 1.0, 2).unwrap();
        assert!(matches!(
            conjugate_nd(&f, &dual2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(conjugate_1d(&f, &dual2).is_err());
    }

    #[test]
    fn infinite_values_are_skipped() {
        let f = line(vec![f64::INFINITY, 2.0, f64::INFINITY]);
        let g = conjugate_1d(&f, f.spec()).unwrap();
        assert_eq!(g.values(), &[-2.0, -2.0, -2.0]);
        let h = conjugate_nd_with(&f, f.spec(), Kernel::LinearTime).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn linear_time_kernel_matches_on_nonconvex_data() {
        let spec = GridSpec::uniform(1, -2.0, 3.0, 41).unwrap();
        let f = GridFn::from_fn(spec, |p| (3.0 * p[0]).sin() + 0.1 * p[0] * p[0]).unwrap();
        let dual = GridSpec::uniform(1, -5.0, 5.0, 57).unwrap();
        let a = conjugate_nd_with(&f, &dual, Kernel::BruteForce).unwrap();
        let b = conjugate_nd_with(&f, &dual, Kernel::LinearTime).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}
