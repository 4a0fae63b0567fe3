use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Relative distance (in cells) under which a coordinate counts as a node.
const NODE_SNAP: f64 = 1e-9;

/// A regular box grid over `ℝᵈ`. Axis `i` carries `counts[i]` equally spaced
/// points from `lower[i]` to `upper[i]` inclusive. Flat indices are
/// row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    counts: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let spec = GridSpec {
            lower,
            upper,
            counts,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same interval and count on every axis.
    pub fn uniform(dim: usize, lower: f64, upper: f64, count: usize) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim], vec![count; dim])
    }

    /// Concatenate the axes of two grids (`self` first).
    pub fn product(&self, other: &GridSpec) -> GridSpec {
        let mut lower = self.lower.clone();
        lower.extend_from_slice(&other.lower);
        let mut upper = self.upper.clone();
        upper.extend_from_slice(&other.upper);
        let mut counts = self.counts.clone();
        counts.extend_from_slice(&other.counts);
        GridSpec {
            lower,
            upper,
            counts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.lower.len();
        if d == 0 {
            return Err(Error::InvalidGrid("grid has no axes".into()));
        }
        if self.upper.len() != d || self.counts.len() != d {
            return Err(Error::InvalidGrid(format!(
                "axis arrays disagree: {} lower, {} upper, {} counts",
                d,
                self.upper.len(),
                self.counts.len()
            )));
        }
        for i in 0..d {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidGrid(format!("axis {i} has a non-finite bound")));
            }
            if lo >= hi {
                return Err(Error::InvalidGrid(format!(
                    "axis {i}: lower {lo} must be below upper {hi}"
                )));
            }
            if self.counts[i] < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {i}: at least 2 points required, got {}",
                    self.counts[i]
                )));
            }
        }
        self.counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .ok_or_else(|| Error::InvalidGrid("grid size overflows".into()))?;
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.counts[axis] - 1) as f64
    }

    /// Coordinate of point `k` on `axis`. Endpoints are exact and a box that
    /// is symmetric about zero yields exactly symmetric coordinates.
    #[inline]
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        let last = self.counts[axis] - 1;
        if k == 0 {
            self.lower[axis]
        } else if k == last {
            self.upper[axis]
        } else {
            (self.lower[axis] * (last - k) as f64 + self.upper[axis] * k as f64) / last as f64
        }
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.counts[axis]).map(|k| self.coord(axis, k)).collect()
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.counts[a];
            flat /= self.counts[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &c)| acc * c + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &k)| self.coord(a, k))
            .collect()
    }

    /// Iterate over all grid points in flat order.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .enumerate()
                .all(|(a, &x)| x >= self.lower[a] && x <= self.upper[a])
    }

    pub fn clamp(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .enumerate()
            .map(|(a, &x)| x.clamp(self.lower[a], self.upper[a]))
            .collect()
    }

    /// Flat index of the grid node nearest to `p` (after clamping).
    pub fn nearest(&self, p: &[f64]) -> usize {
        let idx: Vec<usize> = p
            .iter()
            .enumerate()
            .map(|(a, &x)| {
                let t = ((x - self.lower[a]) / self.spacing(a)).round();
                (t.max(0.0) as usize).min(self.counts[a] - 1)
            })
            .collect();
        self.ravel(&idx)
    }

    /// Split a `2n`-dimensional grid into its two `n`-dimensional blocks.
    pub fn split_blocks(&self) -> Result<(GridSpec, GridSpec)> {
        let d = self.dim();
        if !d.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "expected an even number of axes for X × X*, got {d}"
            )));
        }
        let n = d / 2;
        let first = GridSpec {
            lower: self.lower[..n].to_vec(),
            upper: self.upper[..n].to_vec(),
            counts: self.counts[..n].to_vec(),
        };
        let second = GridSpec {
            lower: self.lower[n..].to_vec(),
            upper: self.upper[n..].to_vec(),
            counts: self.counts[n..].to_vec(),
        };
        Ok((first, second))
    }

    /// Exchange the two halves of a `2n`-dimensional grid.
    pub fn swap_blocks(&self) -> Result<GridSpec> {
        let (a, b) = self.split_blocks()?;
        Ok(b.product(&a))
    }
}

/// Extended-real function sampled on a [`GridSpec`]. Values are finite or
/// `+∞`; at least one value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values supplied for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::NotANumber(i));
            }
            if v == f64::NEG_INFINITY {
                return Err(Error::NegativeInfinity(i));
            }
        }
        if values.iter().all(|v| v.is_infinite()) {
            return Err(Error::NotProper);
        }
        Ok(GridFn { spec, values })
    }

    /// Sample `f` at every grid point.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = spec.points().map(|p| f(&p)).collect();
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_parts(self) -> (GridSpec, Vec<f64>) {
        (self.spec, self.values)
    }

    #[inline]
    pub fn at(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    pub fn at_index(&self, idx: &[usize]) -> f64 {
        self.values[self.spec.ravel(idx)]
    }

    /// Multilinear interpolation inside the box, `+∞` outside. A cell corner
    /// with positive weight and value `+∞` makes the result `+∞`, so the
    /// effective domain between nodes is where whole cells are finite.
    pub fn interpolate(&self, p: &[f64]) -> Result<f64> {
        check_dim(self.spec.dim(), p.len())?;
        if !self.spec.contains(p) {
            return Ok(f64::INFINITY);
        }
        let d = self.spec.dim();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let mut t = (p[a] - self.spec.lower[a]) / self.spec.spacing(a);
            if (t - t.round()).abs() <= NODE_SNAP {
                t = t.round();
            }
            let last = self.spec.counts[a] - 1;
            let k = (t.floor().max(0.0) as usize).min(last - 1);
            base[a] = k;
            frac[a] = (t - k as f64).clamp(0.0, 1.0);
        }
        let mut acc = 0.0;
        let mut idx = base.clone();
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            for a in 0..d {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx[a] = base[a] + 1;
                } else {
                    w *= 1.0 - frac[a];
                    idx[a] = base[a];
                }
            }
            if w == 0.0 {
                continue;
            }
            let v = self.at_index(&idx);
            if v.is_infinite() {
                return Ok(f64::INFINITY);
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Per-axis finite differences of [`GridFn::interpolate`] at `p` with step
    /// equal to the grid spacing: forward when the forward neighbour is finite
    /// and inside the box, else backward, else zero (a wall on both sides).
    pub fn difference_gradient(&self, p: &[f64]) -> Result<Vec<f64>> {
        let here = self.interpolate(p)?;
        let mut g = vec![0.0; p.len()];
        if here.is_infinite() {
            return Ok(g);
        }
        let mut q = p.to_vec();
        for a in 0..p.len() {
            let h = self.spec.spacing(a);
            q[a] = p[a] + h;
            let fwd = if q[a] <= self.spec.upper[a] {
                self.interpolate(&q)?
            } else {
                f64::INFINITY
            };
            if fwd.is_finite() {
                g[a] = (fwd - here) / h;
            } else {
                q[a] = p[a] - h;
                let bwd = if q[a] >= self.spec.lower[a] {
                    self.interpolate(&q)?
                } else {
                    f64::INFINITY
                };
                if bwd.is_finite() {
                    g[a] = (here - bwd) / h;
                }
            }
            q[a] = p[a];
        }
        Ok(g)
    }

    /// Flat index and value of the smallest entry.
    pub fn argmin(&self) -> (usize, f64) {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coords_are_uniform_and_pinned() {
        let g = GridSpec::uniform(1, -1.0, 1.0, 5).unwrap();
        assert_eq!(g.axis_coords(0), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn ravel_unravel_row_major() {
        let g = GridSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![3, 4]).unwrap();
        assert_eq!(g.unravel(5), vec![1, 1]);
        assert_eq!(g.ravel(&[2, 3]), 11);
        for i in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(vec![1.0], vec![0.0], vec![3]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![1.0], vec![1]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![1.0, 2.0], vec![3]).is_err());
        assert!(GridSpec::new(vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn rejects_improper_and_negative_infinity() {
        let g = GridSpec::uniform(1, 0.0, 1.0, 2).unwrap();
        assert!(matches!(
            GridFn::new(g.clone(), vec![f64::INFINITY; 2]),
            Err(Error::NotProper)
        ));
        assert!(matches!(
            GridFn::new(g.clone(), vec![0.0, f64::NEG_INFINITY]),
            Err(Error::NegativeInfinity(1))
        ));
        assert!(GridFn::new(g, vec![0.0]).is_err());
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_walls_at_infinity() {
        let g = GridSpec::uniform(1, 0.0, 2.0, 3).unwrap();
        let f = GridFn::new(g, vec![0.0, 1.0, f64::INFINITY]).unwrap();
        assert_eq!(f.interpolate(&[1.0]).unwrap(), 1.0);
        assert_eq!(f.interpolate(&[0.5]).unwrap(), 0.5);
        assert!(f.interpolate(&[1.5]).unwrap().is_infinite());
        assert!(f.interpolate(&[3.0]).unwrap().is_infinite());
        // at the node next to the wall only the backward difference is finite
        assert_eq!(f.difference_gradient(&[1.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn swap_blocks_exchanges_halves() {
        let g = GridSpec::new(vec![-1.0, -3.0], vec![1.0, 3.0], vec![5, 7]).unwrap();
        let s = g.swap_blocks().unwrap();
        assert_eq!(s.lower(), &[-3.0, -1.0]);
        assert_eq!(s.counts(), &[7, 5]);
        assert!(GridSpec::uniform(3, 0.0, 1.0, 2).unwrap().swap_blocks().is_err());
    }
}
