//! Free-space reconstruction of a torus solution.
//!
//! The torus resolvent `P` is the free Green function plus its periodic
//! images, so `u = P f(u) - H f(u)` with `H` the image kernel is the
//! whole-space equation with the source truncated to the box. The part of
//! `f(U)` outside the box enters as a lagged potential, refreshed until it
//! settles. Once solved, `U = G * f(u)` extends the state to all of `R^N`.

use crate::error::{Error, Result};
use crate::fractional::FracLaplacian;
use crate::grid::{Field, Grid, norm2, symmetrize};
use crate::kernel::{ImageKernel, ScaledGreen, closed_box_sources, green_table, potential_at};
use crate::krylov::gmres;
use crate::nonlinearity::NonlinearitySpec;
use crate::quad::gauss_on;
use serde::{Deserialize, Serialize};

/// Whole-space quantities of a reconstructed state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WholeSpaceState {
    /// Free-space solution sampled on the box.
    pub field: Field,
    pub residual: f64,
    pub newton_iterations: usize,
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub primitive: f64,
    /// Parts of `mass`, `potential`, `primitive` carried by the exterior.
    pub exterior_mass: f64,
    pub exterior_potential: f64,
    pub exterior_primitive: f64,
}

/// Evaluator of `U(y) = int_box G(|y - x|) f(u(x)) dx`.
///
/// Sources are grouped in cells of `8^N` points; a cell seen from more than
/// ten of its diameters acts through its total charge at its centroid.
/// Beyond `8L` the whole box acts through its monopole and (isotropic, by
/// symmetry) second moment.
pub struct Reconstruction {
    pub green: ScaledGreen,
    pub sources: Vec<([f64; 3], f64)>,
    pub dim: usize,
    cells: Vec<Cell>,
    far: f64,
    q0: f64,
    q2: f64,
}

struct Cell {
    centre: [f64; 3],
    charge: f64,
    reach: f64,
    range: std::ops::Range<usize>,
}

impl Reconstruction {
    pub fn new(field: &Field, spec: &NonlinearitySpec, s: f64, lambda: f64) -> Reconstruction {
        let g = field.grid;
        let rho = spec.f_vec(&field.values);
        let green = green_table(g.dim, s).scaled(lambda);
        let mut sources = closed_box_sources(&g, &rho, 1e-17);
        let q0 = sources.iter().map(|(_, q)| q).sum();
        let q2 = sources.iter().map(|(p, q)| q * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).sum();
        let far = if g.dim == 1 { f64::INFINITY } else { 8.0 * g.half_width };
        let side = 8.0 * g.spacing();
        let key = |p: &[f64; 3]| -> [i64; 3] {
            let mut k = [0i64; 3];
            for a in 0..g.dim {
                k[a] = ((p[a] + g.half_width) / side).floor() as i64;
            }
            k
        };
        sources.sort_by_key(|(p, _)| key(p));
        let mut cells = Vec::new();
        let mut start = 0;
        while start < sources.len() {
            let k = key(&sources[start].0);
            let mut end = start;
            while end < sources.len() && key(&sources[end].0) == k {
                end += 1;
            }
            let block = &sources[start..end];
            let charge: f64 = block.iter().map(|(_, q)| q).sum();
            let total: f64 = block.iter().map(|(_, q)| q.abs()).sum();
            let mut centre = [0.0; 3];
            for (p, q) in block {
                for a in 0..3 {
                    centre[a] += p[a] * q.abs() / total.max(f64::MIN_POSITIVE);
                }
            }
            cells.push(Cell { centre, charge, reach: 10.0 * side * (g.dim as f64).sqrt(), range: start..end });
            start = end;
        }
        Reconstruction { green, sources, dim: g.dim, cells, far, q0, q2 }
    }

    pub fn eval(&self, y: &[f64; 3]) -> f64 {
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        if r > self.far {
            return self.q0 * self.green.eval(r) + 0.5 * self.q2 / self.dim as f64 * self.green.laplacian(r);
        }
        if self.dim == 1 {
            return potential_at(&self.green, &self.sources, y, self.dim);
        }
        let mut acc = 0.0;
        for c in &self.cells {
            let mut d2 = 0.0;
            for a in 0..self.dim {
                let d = y[a] - c.centre[a];
                d2 += d * d;
            }
            if d2 > c.reach * c.reach {
                acc += c.charge * self.green.eval(d2.sqrt());
            } else {
                acc += potential_at(&self.green, &self.sources[c.range.clone()], y, self.dim);
            }
        }
        acc
    }

    /// `(int U^2, int f(U) U, int F(U))` over the complement of the box.
    pub fn exterior_integrals(&self, half_width: f64, spec: &NonlinearitySpec) -> (f64, f64, f64) {
        let mut acc = (0.0, 0.0, 0.0);
        for (y, w) in exterior_nodes(self.dim, half_width) {
            let u = self.eval(&y);
            acc.0 += w * u * u;
            acc.1 += w * spec.f(u) * u;
            acc.2 += w * spec.big_f(u);
        }
        acc
    }
}

/// Quadrature of the complement of `[-L, L]^N` on one fundamental wedge
/// `x_1 >= x_2 >= .. >= 0`, weights multiplied by the wedge count.
///
/// With `x_1 = L e^sigma` the integrands decay exponentially in `sigma`.
pub fn exterior_nodes(dim: usize, half_width: f64) -> Vec<([f64; 3], f64)> {
    let (mut sig, mut sw) = gauss_on(20, 0.0, 2.0);
    let (s2, w2) = gauss_on(28, 2.0, 24.0);
    sig.extend(s2);
    sw.extend(w2);
    let (tau, tw) = gauss_on(if dim == 1 { 1 } else { 12 }, 0.0, 1.0);
    let mut out = Vec::new();
    for (sg, wsg) in sig.iter().zip(&sw) {
        let x = half_width * sg.exp();
        match dim {
            1 => out.push(([x, 0.0, 0.0], 2.0 * x * wsg)),
            2 => {
                for (t, wt) in tau.iter().zip(&tw) {
                    out.push(([x, x * t, 0.0], 8.0 * x * x * wsg * wt));
                }
            }
            _ => {
                for (t1, w1) in tau.iter().zip(&tw) {
                    for (t2, w2) in tau.iter().zip(&tw) {
                        out.push(([x, x * t1, x * t1 * t2], 48.0 * x * x * x * t1 * wsg * w1 * w2));
                    }
                }
            }
        }
    }
    out
}

/// Images of a wedge point under the hyperoctahedral group.
fn wedge_images(dim: usize, y: &[f64; 3]) -> Vec<[f64; 3]> {
    let perms: &[[usize; 3]] = match dim {
        1 => &[[0, 0, 0]],
        2 => &[[0, 1, 0], [1, 0, 0]],
        _ => &[[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
    };
    let mut out = Vec::new();
    for p in perms {
        for mask in 0..(1usize << dim) {
            let mut z = [0.0; 3];
            for a in 0..dim {
                let v = y[p[a]];
                z[a] = if mask >> a & 1 == 1 { -v } else { v };
            }
            out.push(z);
        }
    }
    out
}

/// Potential on the grid generated by `f(U)` outside the box, for a
/// lattice-symmetric state.
fn exterior_source_potential(recon: &Reconstruction, grid: &Grid, spec: &NonlinearitySpec) -> Vec<f64> {
    let dim = grid.dim;
    let mut charges: Vec<([f64; 3], f64)> = Vec::new();
    let (mut t0, mut t2) = (0.0, 0.0);
    for (y, w) in exterior_nodes(dim, grid.half_width) {
        let q = spec.f(recon.eval(&y)) * w;
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        if r > recon.far {
            t0 += q * recon.green.eval(r);
            t2 += q * recon.green.laplacian(r);
            continue;
        }
        let imgs = wedge_images(dim, &y);
        let share = q / imgs.len() as f64;
        for z in imgs {
            charges.push((z, share));
        }
    }
    let floor = 0.5 * grid.spacing();
    let n = grid.n;
    let mut cache: std::collections::HashMap<[usize; 3], f64> = Default::default();
    let mut out = vec![0.0; grid.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let ix = grid.unravel(idx);
        let mut key = [0usize; 3];
        for a in 0..dim {
            key[a] = (ix[a] as i64 - (n / 2) as i64).unsigned_abs() as usize;
        }
        key[..dim].sort_unstable();
        if let Some(v) = cache.get(&key) {
            *o = *v;
            continue;
        }
        let mut x = [0.0; 3];
        for a in 0..dim {
            x[a] = key[a] as f64 * grid.spacing();
        }
        let mut acc = t0 + 0.5 * t2 / dim as f64 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        for (z, q) in &charges {
            let mut r2 = 0.0;
            for a in 0..dim {
                let d = x[a] - z[a];
                r2 += d * d;
            }
            acc += q * recon.green.eval(r2.sqrt().max(floor));
        }
        cache.insert(key, acc);
        *o = acc;
    }
    out
}

/// Solve `u - P f(u) + H f(u) = 0` starting from a torus solution.
pub fn solve_whole_space(
    torus: &Field,
    spec: &NonlinearitySpec,
    s: f64,
    lambda: f64,
    tol: f64,
    symmetric: bool,
) -> Result<WholeSpaceState> {
    let grid: Grid = torus.grid;
    let op = FracLaplacian::new(grid, s)?;
    let green = green_table(grid.dim, s).scaled(lambda);
    let image = ImageKernel::new(&grid, &green);
    let w = grid.weight();
    let sym = |v: Vec<f64>| if symmetric { symmetrize(&grid, &v) } else { v };
    let gnorm = |v: &[f64]| norm2(v) * w.sqrt();
    let mut u = torus.values.clone();
    let first = Reconstruction::new(torus, spec, s, lambda);
    let mut extra = sym(exterior_source_potential(&first, &grid, spec));
    let mut total = 0;
    let mut rn = 0.0;
    let mut recon = first;
    for outer in 0..6 {
        let (next, r, it) = newton_free(&op, &image, spec, lambda, tol, u, &extra, &sym, &gnorm, grid)?;
        u = next;
        rn = r;
        total += it;
        // refresh the exterior source from the current reconstruction
        let field = Field::new(grid, u.clone())?;
        recon = Reconstruction::new(&field, spec, s, lambda);
        let fresh = sym(exterior_source_potential(&recon, &grid, spec));
        let change = gnorm(&fresh.iter().zip(&extra).map(|(a, b)| a - b).collect::<Vec<_>>());
        extra = fresh;
        if change <= 1e-9 * gnorm(&u) || outer == 5 {
            break;
        }
    }
    let field = Field::new(grid, u)?;
    let (em, ev, ef) = recon.exterior_integrals(grid.half_width, spec);
    let rho = spec.f_vec(&field.values);
    let box_mass = w * field.values.iter().map(|v| v * v).sum::<f64>();
    let box_v = w * field.values.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>();
    let box_f = w * spec.big_f_vec(&field.values).iter().sum::<f64>();
    let mass = box_mass + em;
    // (A + lambda) U = f(U) on R^N, so T + lambda M = int f(U) U
    let kinetic = box_v + ev - lambda * mass;
    Ok(WholeSpaceState {
        field,
        residual: rn,
        newton_iterations: total,
        mass,
        kinetic,
        potential: box_v + ev,
        primitive: box_f + ef,
        exterior_mass: em,
        exterior_potential: ev,
        exterior_primitive: ef,
    })
}

#[allow(clippy::too_many_arguments)]
fn newton_free(
    op: &FracLaplacian,
    image: &ImageKernel,
    spec: &NonlinearitySpec,
    lambda: f64,
    tol: f64,
    mut u: Vec<f64>,
    extra: &[f64],
    sym: &dyn Fn(Vec<f64>) -> Vec<f64>,
    gnorm: &dyn Fn(&[f64]) -> f64,
    grid: Grid,
) -> Result<(Vec<f64>, f64, usize)> {
    let residual = |u: &[f64]| -> Vec<f64> {
        let fu = spec.f_vec(u);
        let pf = op.resolvent(&fu, lambda);
        let hf = image.apply(&fu);
        (0..u.len()).map(|i| u[i] - pf[i] + hf[i] - extra[i]).collect()
    };
    let mut r = residual(&u);
    let mut rn = gnorm(&r);
    let target = tol * gnorm(&u).max(1.0);
    let mut iters = 0;
    while rn > target {
        if iters >= 30 {
            return Err(Error::solver(
                format!("whole-space Newton stalled at residual {rn:e}"),
                Some(Field { grid, values: u }),
            ));
        }
        iters += 1;
        let fp = spec.fprime_vec(&u);
        let jac = |v: &[f64]| -> Vec<f64> {
            let q: Vec<f64> = v.iter().zip(&fp).map(|(a, b)| a * b).collect();
            let pq = op.resolvent(&q, lambda);
            let hq = image.apply(&q);
            sym(v.iter().zip(pq.iter().zip(&hq)).map(|(a, (b, c))| a - b + c).collect())
        };
        let rhs: Vec<f64> = sym(r.iter().map(|x| -x).collect());
        let sol = gmres(jac, &rhs, None, 80, 800, 1e-8);
        let delta = sym(sol.x);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + alpha * d).collect();
            let tr = residual(&trial);
            let tn = gnorm(&tr);
            if tn < rn {
                u = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            if rn < 100.0 * target {
                break;
            }
            return Err(Error::solver(
                format!("whole-space line search failed at residual {rn:e}"),
                Some(Field { grid, values: u }),
            ));
        }
    }
    Ok((u, rn, iters))
}
