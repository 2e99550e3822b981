//! Periodic boxes, fields and the lattice symmetry group.

use crate::error::{Error, Result, invalid};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform periodic grid on `[-L, L)^N` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub half_width: f64,
    pub n: usize,
}

pub fn make_grid(dim: usize, half_width: f64, n: usize) -> Result<Grid> {
    if !(1..=3).contains(&dim) {
        return invalid(format!("dimension {dim} not in {{1,2,3}}"));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return invalid(format!("half width {half_width} must be positive"));
    }
    if n < 8 || n % 2 != 0 {
        return invalid(format!("points per axis {n} must be even and at least 8"));
    }
    Ok(Grid { dim, half_width, n })
}

impl Grid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight `h^N`.
    pub fn weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// All axis coordinates.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Wavenumber of FFT index `j`, ordered `0, 1, .., n/2-1, -n/2, .., -1`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let jj = if j < self.n / 2 { j as i64 } else { j as i64 - self.n as i64 };
        PI * jj as f64 / self.half_width
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Multi-index of a flat index (axis 0 slowest).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn ravel(&self, ix: &[usize]) -> usize {
        ix.iter().take(self.dim).fold(0, |acc, &i| acc * self.n + i)
    }

    /// Position of a flat index.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coord(ix[a]);
        }
        p
    }

    /// Squared radius of every grid point.
    pub fn radius_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let p = self.point(i);
                p[..self.dim].iter().map(|x| x * x).sum()
            })
            .collect()
    }

    /// Index of the origin.
    pub fn origin(&self) -> usize {
        let c = [self.n / 2; 3];
        self.ravel(&c[..self.dim])
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.n == other.n && self.half_width == other.half_width
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Same lattice with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Grid {
        Grid { half_width: self.half_width * factor, ..*self }
    }
}

/// Real samples on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Field> {
        if values.len() != grid.len() {
            return invalid(format!("field length {} but grid has {} points", values.len(), grid.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("field contains non-finite values");
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Field {
        Field { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Field {
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..grid.dim])).collect();
        Field { grid, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn integral(&self) -> f64 {
        self.grid.weight() * self.values.iter().sum::<f64>()
    }

    pub fn dot(&self, other: &Field) -> f64 {
        self.grid.weight() * dot(&self.values, &other.values)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Index permutation for the reflection `x_axis -> -x_axis`.
pub fn reflection_index(n: usize, i: usize) -> usize {
    (n - i) % n
}

/// Average over the hyperoctahedral group of the lattice (axis reflections
/// and axis permutations). Projects onto lattice-symmetric fields.
pub fn symmetrize(grid: &Grid, v: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let dim = grid.dim;
    let perms: Vec<Vec<usize>> = match dim {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
    };
    let count = (perms.len() << dim) as f64;
    let mut out = vec![0.0; v.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let ix = grid.unravel(idx);
        let mut acc = 0.0;
        for p in &perms {
            for mask in 0..(1usize << dim) {
                let mut jx = [0usize; 3];
                for a in 0..dim {
                    let src = ix[p[a]];
                    jx[a] = if mask >> a & 1 == 1 { reflection_index(n, src) } else { src };
                }
                acc += v[grid.ravel(&jx[..dim])];
            }
        }
        *o = acc / count;
    }
    out
}

/// Reflect along one axis about the origin.
pub fn reflect_axis(grid: &Grid, v: &[f64], axis: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let mut ix = grid.unravel(idx);
        ix[axis] = reflection_index(grid.n, ix[axis]);
        *o = v[grid.ravel(&ix[..grid.dim])];
    }
    out
}
