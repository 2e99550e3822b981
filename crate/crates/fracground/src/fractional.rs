//! The fractional Laplacian on the periodic box.

use crate::error::{Result, invalid};
use crate::grid::{Field, Grid};
use crate::spectral::Spectral;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Normalising constant of the singular-integral form of `(-Delta)^s`.
pub fn cns_constant(dim: usize, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("order {s} outside (0,1)"));
    }
    let nh = dim as f64 / 2.0;
    Ok(4f64.powf(s) * PI.powf(-nh) * gamma(nh + s) / gamma(2.0 - s) * s * (1.0 - s))
}

/// `(-Delta)^s` as the multiplier `|k|^{2s}` together with its FFT plans.
#[derive(Clone, Debug)]
pub struct FracLaplacian {
    pub spectral: Spectral,
    pub s: f64,
    pub symbol: Vec<f64>,
}

impl FracLaplacian {
    pub fn new(grid: Grid, s: f64) -> Result<FracLaplacian> {
        if !(s > 0.0 && s <= 1.0) {
            return invalid(format!("order {s} outside (0,1]"));
        }
        let spectral = Spectral::new(grid);
        let symbol = spectral.frac_symbol(s);
        Ok(FracLaplacian { spectral, s, symbol })
    }

    pub fn grid(&self) -> &Grid {
        &self.spectral.grid
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.spectral.apply_symbol(u, &self.symbol)
    }

    /// `((-Delta)^s + lambda) u`.
    pub fn apply_shifted(&self, u: &[f64], lambda: f64) -> Vec<f64> {
        let sym: Vec<f64> = self.symbol.iter().map(|m| m + lambda).collect();
        self.spectral.apply_symbol(u, &sym)
    }

    /// `((-Delta)^s + lambda)^{-1} u`.
    pub fn resolvent(&self, u: &[f64], lambda: f64) -> Vec<f64> {
        let sym: Vec<f64> = self.symbol.iter().map(|m| 1.0 / (m + lambda)).collect();
        self.spectral.apply_symbol(u, &sym)
    }

    /// Largest symbol value, an upper bound for the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.symbol.iter().cloned().fold(0.0, f64::max)
    }

    /// `E(u, v) = sum |k|^{2s} u^ conj(v^)` with Plancherel weights.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let uh = self.spectral.forward(u);
        let vh = self.spectral.forward(v);
        self.spectral.spectral_product(&uh, &vh, Some(&self.symbol))
    }
}

pub fn frac_laplacian_apply(u: &Field, s: f64) -> Result<Field> {
    let op = FracLaplacian::new(u.grid, s)?;
    Ok(Field { grid: u.grid, values: op.apply(&u.values) })
}

/// Returns `(E(u,v), lambda |u|_2^2 + E(u,u))`.
pub fn hs_products(u: &Field, v: &Field, s: f64, lambda: f64) -> Result<(f64, f64)> {
    u.grid.check_same(&v.grid)?;
    let op = FracLaplacian::new(u.grid, s)?;
    let uh = op.spectral.forward(&u.values);
    let vh = op.spectral.forward(&v.values);
    let e_uv = op.spectral.spectral_product(&uh, &vh, Some(&op.symbol));
    let e_uu = op.spectral.spectral_product(&uh, &uh, Some(&op.symbol));
    Ok((e_uv, lambda * u.dot(u) + e_uu))
}

/// Direct principal-value quadrature of
/// `c_{1,s} PV int (u(x)-u(y)) / |x-y|^{1+2s} dy` for `N = 1`.
///
/// Points within `cutoff` of `x` are replaced by the second-order Taylor
/// term, and `u` is taken to vanish outside the box.
pub fn singular_integral_apply(u: &Field, s: f64, cutoff: f64) -> Result<Field> {
    let g = u.grid;
    if g.dim != 1 {
        return invalid("singular integral route is one-dimensional only");
    }
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("order {s} outside (0,1)"));
    }
    let c = cns_constant(1, s)?;
    let h = g.spacing();
    let n = g.n;
    let x = g.axis();
    let v = &u.values;
    let p = 1.0 + 2.0 * s;
    let wcount = (cutoff / h).round().max(1.0) as usize;
    let delta = (wcount as f64 - 0.5) * h;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let d = (i as i64 - j as i64).unsigned_abs() as usize;
            if d < wcount {
                continue;
            }
            acc += (v[i] - v[j]) / ((d as f64) * h).powf(p) * h;
        }
        // window: -u''(x)/2 * int_{|z|<delta} z^2 |z|^{-1-2s} dz
        let im = if i == 0 { 0.0 } else { v[i - 1] };
        let ip = if i + 1 == n { 0.0 } else { v[i + 1] };
        let upp = (ip - 2.0 * v[i] + im) / (h * h);
        acc += -upp * delta.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
        // exterior of the box, where u = 0
        let left = x[i] + g.half_width;
        let right = g.half_width - x[i];
        let a = (left + 0.5 * h).max(delta);
        let b = (right - 0.5 * h).max(delta);
        acc += v[i] * (a.powf(-2.0 * s) + b.powf(-2.0 * s)) / (2.0 * s);
        out[i] = c * acc;
    }
    Ok(Field { grid: g, values: out })
}
