//! Whole-space Green function of `(-Delta)^s + lambda` and the periodic image
//! kernel that turns the torus resolvent into the free-space one.
//!
//! `G` has the subordination form `G(r) = int_0^inf rho(t) Phi_N(t, r) dt`
//! where `Phi_N` is the Yukawa kernel scaled so that `1/(|k|^2s + 1)` equals
//! `int rho(t) 2t / (|k|^2 + t^2) dt`.  Every term is positive, so `G` and
//! its Laplacian are tabulated in log-log form for `lambda = 1` and rescaled.

use crate::grid::Grid;
use crate::quad::gauss_legendre;
use crate::special::{bessel_k0, recip_gamma_neg};
use crate::spectral::Spectral;
use statrs::function::gamma::gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

const LOG_R_MIN: f64 = -5.0 * std::f64::consts::LN_10;
const NODES_PER_DECADE: usize = 100;
const DECADES: usize = 10;
const ASYMPTOTIC_TERMS: usize = 8;

/// Tabulated `G` and `Delta G` for `lambda = 1`.
#[derive(Debug)]
pub struct GreenTable {
    pub dim: usize,
    pub s: f64,
    dlog: f64,
    log_g: Vec<f64>,
    log_lap: Vec<f64>,
    /// `(b_j, p_j)` with `G(r) ~ sum b_j r^{-p_j}` as `r -> inf`.
    pub asymptotic: Vec<(f64, f64)>,
}

fn yukawa(dim: usize, t: f64, r: f64) -> f64 {
    let x = t * r;
    if x > 745.0 {
        return 0.0;
    }
    match dim {
        1 => (-x).exp(),
        2 => t * bessel_k0(x) / PI,
        _ => t * (-x).exp() / (2.0 * PI * r),
    }
}

impl GreenTable {
    fn build(dim: usize, s: f64) -> GreenTable {
        let dy = 0.02;
        let ys: Vec<f64> = (0..=3350).map(|i| -45.0 + i as f64 * dy).collect();
        let (sp, cp) = (PI * s).sin_cos();
        // rho(t) t dy
        let wts: Vec<(f64, f64)> = ys
            .iter()
            .map(|&y| {
                let t = y.exp();
                let a = t.powf(2.0 * s);
                let rho = a * sp / (PI * (1.0 + 2.0 * a * cp + a * a));
                (t, rho * t * dy)
            })
            .collect();
        let count = NODES_PER_DECADE * DECADES + 1;
        let dlog = std::f64::consts::LN_10 / NODES_PER_DECADE as f64;
        let mut log_g = Vec::with_capacity(count);
        let mut log_lap = Vec::with_capacity(count);
        for i in 0..count {
            let r = (LOG_R_MIN + i as f64 * dlog).exp();
            let mut g = 0.0;
            let mut lap = 0.0;
            for &(t, w) in &wts {
                let k = yukawa(dim, t, r);
                if k == 0.0 && t * r > 1.0 {
                    break;
                }
                g += w * k;
                lap += w * t * t * k;
            }
            log_g.push(g.ln());
            log_lap.push(lap.ln());
        }
        let nh = dim as f64 / 2.0;
        let asymptotic = (1..=ASYMPTOTIC_TERMS)
            .map(|j| {
                let sj = s * j as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let b = sign * 4f64.powf(sj) * gamma(nh + sj) / PI.powf(nh) * recip_gamma_neg(sj);
                (b, dim as f64 + 2.0 * sj)
            })
            .collect();
        GreenTable { dim, s, dlog, log_g, log_lap, asymptotic }
    }

    fn interp(&self, table: &[f64], r: f64) -> f64 {
        let u = (r.ln() - LOG_R_MIN) / self.dlog;
        let last = table.len() - 1;
        if u <= 0.0 {
            // power-law extrapolation towards the origin
            let slope = table[1] - table[0];
            return (table[0] + u * slope).exp();
        }
        let i = (u.floor() as usize).clamp(1, last - 2);
        let t = u - i as f64;
        let (f0, f1, f2, f3) = (table[i - 1], table[i], table[i + 1], table[i + 2]);
        // cubic Lagrange through nodes -1, 0, 1, 2
        let v = -t * (t - 1.0) * (t - 2.0) / 6.0 * f0 + (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0 * f1
            - (t + 1.0) * t * (t - 2.0) / 2.0 * f2
            + (t + 1.0) * t * (t - 1.0) / 6.0 * f3;
        v.exp()
    }

    fn r_max(&self) -> f64 {
        (LOG_R_MIN + (self.log_g.len() - 1) as f64 * self.dlog).exp()
    }

    /// `G(r)` for `lambda = 1`.
    pub fn g1(&self, r: f64) -> f64 {
        if r >= self.r_max() {
            self.asymptotic.iter().map(|(b, p)| b * r.powf(-p)).sum()
        } else {
            self.interp(&self.log_g, r)
        }
    }

    /// `Delta G(r)` for `lambda = 1`, `r > 0`.
    pub fn lap1(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        if r >= self.r_max() {
            self.asymptotic.iter().map(|(b, p)| b * p * (p + 2.0 - n) * r.powf(-p - 2.0)).sum()
        } else {
            self.interp(&self.log_lap, r)
        }
    }

    /// Green function of `(-Delta)^s + lambda`.
    pub fn green(&self, r: f64, lambda: f64) -> f64 {
        let a = lambda.powf(0.5 / self.s);
        lambda.powf(self.dim as f64 / (2.0 * self.s) - 1.0) * self.g1(a * r)
    }

    /// Laplacian of the Green function of `(-Delta)^s + lambda` at `r > 0`.
    pub fn laplacian(&self, r: f64, lambda: f64) -> f64 {
        let a = lambda.powf(0.5 / self.s);
        lambda.powf(self.dim as f64 / (2.0 * self.s) - 1.0) * a * a * self.lap1(a * r)
    }

    /// Evaluator with the `lambda` scaling folded in.
    pub fn scaled(self: &Arc<Self>, lambda: f64) -> ScaledGreen {
        let a = lambda.powf(0.5 / self.s);
        ScaledGreen {
            table: self.clone(),
            a,
            pre: lambda.powf(self.dim as f64 / (2.0 * self.s) - 1.0),
            lambda,
        }
    }
}

/// `G` at a fixed `lambda`.
#[derive(Clone, Debug)]
pub struct ScaledGreen {
    pub table: Arc<GreenTable>,
    a: f64,
    pre: f64,
    pub lambda: f64,
}

impl ScaledGreen {
    pub fn eval(&self, r: f64) -> f64 {
        self.pre * self.table.g1(self.a * r)
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        self.pre * self.a * self.a * self.table.lap1(self.a * r)
    }

    /// Asymptotic coefficients `(b_j, p_j)` at this `lambda`.
    pub fn asymptotic(&self) -> Vec<(f64, f64)> {
        self.table
            .asymptotic
            .iter()
            .enumerate()
            .map(|(j, &(b, p))| (b * self.lambda.powi(-(j as i32) - 2), p))
            .collect()
    }
}

/// Cached table for `(N, s)`.
pub fn green_table(dim: usize, s: f64) -> Arc<GreenTable> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<GreenTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (dim, s.to_bits());
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let t = Arc::new(GreenTable::build(dim, s));
    cache.lock().unwrap().insert(key, t.clone());
    t
}

/// `int_{|y|_inf > A} |y|^{-p} dy` in dimension `N`.
fn exterior_power_integral(dim: usize, p: f64, a: f64) -> f64 {
    let n = dim as f64;
    let face = match dim {
        1 => 1.0,
        2 => {
            let (x, w) = gauss_legendre(48);
            x.iter().zip(&w).map(|(t, wt)| wt * (1.0 + t * t).powf(-p / 2.0)).sum()
        }
        _ => {
            let (x, w) = gauss_legendre(32);
            let mut acc = 0.0;
            for (t1, w1) in x.iter().zip(&w) {
                for (t2, w2) in x.iter().zip(&w) {
                    acc += w1 * w2 * (1.0 + t1 * t1 + t2 * t2).powf(-p / 2.0);
                }
            }
            acc
        }
    };
    2.0 * n * a.powf(n - p) / (p - n) * face
}

fn near_images(dim: usize) -> i64 {
    match dim {
        1 => 64,
        2 => 8,
        _ => 4,
    }
}

fn far_images(dim: usize) -> i64 {
    match dim {
        1 => 20000,
        2 => 256,
        _ => 48,
    }
}

/// Sum of `G` and `Delta G` over the lattice `2L m` with `|m|_inf > near`.
fn lattice_tail(g: &ScaledGreen, dim: usize, period: f64, near: i64) -> (f64, f64) {
    let far = far_images(dim);
    let mut t0 = 0.0;
    let mut lap = 0.0;
    let mut visit = |m: &[i64]| {
        let linf = m.iter().map(|x| x.abs()).max().unwrap();
        if linf <= near {
            return;
        }
        let r = period * (m.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
        t0 += g.eval(r);
        lap += g.laplacian(r);
    };
    match dim {
        1 => {
            for a in -far..=far {
                visit(&[a]);
            }
        }
        2 => {
            for a in -far..=far {
                for b in -far..=far {
                    visit(&[a, b]);
                }
            }
        }
        _ => {
            for a in -far..=far {
                for b in -far..=far {
                    for c in -far..=far {
                        visit(&[a, b, c]);
                    }
                }
            }
        }
    }
    // continuum beyond the brute-force shell
    let n = dim as f64;
    let edge = far as f64 + 0.5;
    for (b, p) in g.asymptotic() {
        let cells = exterior_power_integral(dim, p, edge);
        t0 += b * period.powf(-p) * cells;
        lap += b * p * (p + 2.0 - n) * period.powf(-p - 2.0) * exterior_power_integral(dim, p + 2.0, edge);
    }
    (t0, lap)
}

/// `H(z) = sum_{m != 0} G(|z + 2L m|)` on grid offsets, applied to closed-box
/// sources by a zero-padded FFT convolution.
#[derive(Clone, Debug)]
pub struct ImageKernel {
    pub grid: Grid,
    padded: Spectral,
    hhat: Vec<f64>,
}

impl ImageKernel {
    pub fn new(grid: &Grid, green: &ScaledGreen) -> ImageKernel {
        let dim = grid.dim;
        let n = grid.n;
        let h = grid.spacing();
        let period = 2.0 * grid.half_width;
        let near = near_images(dim);
        let (t0, lap) = lattice_tail(green, dim, period, near);
        let d = lap / dim as f64;
        let floor = 0.5 * h;
        let mut images: Vec<[f64; 3]> = Vec::new();
        let mut m = [0i64; 3];
        let side = (2 * near + 1) as usize;
        for idx in 0..side.pow(dim as u32) {
            let mut rest = idx;
            for a in 0..dim {
                m[a] = (rest % side) as i64 - near;
                rest /= side;
            }
            if m[..dim].iter().all(|&x| x == 0) {
                continue;
            }
            let mut v = [0.0; 3];
            for a in 0..dim {
                v[a] = period * m[a] as f64;
            }
            images.push(v);
        }
        let pgrid = Grid { dim, half_width: 2.0 * grid.half_width, n: 2 * n };
        let np = 2 * n;
        let mut harr = vec![0.0; pgrid.len()];
        // values depend on sorted absolute offsets only
        let mut cache: HashMap<[usize; 3], f64> = HashMap::new();
        for (pidx, slot) in harr.iter_mut().enumerate() {
            let ix = pgrid.unravel(pidx);
            let mut key = [0usize; 3];
            for a in 0..dim {
                key[a] = if ix[a] <= n { ix[a] } else { np - ix[a] };
            }
            key[..dim].sort_unstable();
            if let Some(v) = cache.get(&key) {
                *slot = *v;
                continue;
            }
            let mut z = [0.0; 3];
            for a in 0..dim {
                z[a] = key[a] as f64 * h;
            }
            let mut acc = 0.0;
            for img in &images {
                let mut r2 = 0.0;
                for a in 0..dim {
                    let c = z[a] + img[a];
                    r2 += c * c;
                }
                acc += green.eval(r2.sqrt().max(floor));
            }
            let z2: f64 = z[..dim].iter().map(|c| c * c).sum();
            acc += t0 + 0.5 * z2 * d;
            cache.insert(key, acc);
            *slot = acc;
        }
        let padded = Spectral::new(pgrid);
        let hhat = padded.forward(&harr).iter().map(|c| c.re).collect();
        ImageKernel { grid: *grid, padded, hhat }
    }

    /// `int_box H(x - y) rho(y) dy` at the grid points, with the closed box
    /// `[-L, L]^N` and trapezoid edge weights (periodic copy at `+L`).
    pub fn apply(&self, rho: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let n = g.n;
        let dim = g.dim;
        let pg = &self.padded.grid;
        let mut src = vec![0.0; pg.len()];
        let closed = (n + 1).pow(dim as u32);
        let mut ix = [0usize; 3];
        for c in 0..closed {
            let mut rest = c;
            let mut w = 1.0;
            let mut jx = [0usize; 3];
            for a in (0..dim).rev() {
                ix[a] = rest % (n + 1);
                rest /= n + 1;
                if ix[a] == 0 || ix[a] == n {
                    w *= 0.5;
                }
                jx[a] = ix[a] % n;
            }
            src[pg.ravel(&ix[..dim])] = w * rho[g.ravel(&jx[..dim])];
        }
        let mut c = self.padded.forward(&src);
        for (ci, hk) in c.iter_mut().zip(&self.hhat) {
            *ci *= *hk;
        }
        let full = self.padded.inverse(c);
        let w = g.weight();
        let mut out = vec![0.0; g.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let ix = g.unravel(idx);
            *o = w * full[pg.ravel(&ix[..dim])];
        }
        out
    }
}

/// Point sources of a closed-box field, `(position, weight h^N w_j rho_j)`.
pub fn closed_box_sources(grid: &Grid, rho: &[f64], rel_floor: f64) -> Vec<([f64; 3], f64)> {
    let n = grid.n;
    let dim = grid.dim;
    let hw = grid.weight();
    let peak = rho.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let closed = (n + 1).pow(dim as u32);
    let mut out = Vec::new();
    for c in 0..closed {
        let mut rest = c;
        let mut w = hw;
        let mut jx = [0usize; 3];
        let mut p = [0.0; 3];
        for a in (0..dim).rev() {
            let i = rest % (n + 1);
            rest /= n + 1;
            if i == 0 || i == n {
                w *= 0.5;
            }
            jx[a] = i % n;
            p[a] = -grid.half_width + i as f64 * grid.spacing();
        }
        let v = rho[grid.ravel(&jx[..dim])];
        if v.abs() > rel_floor * peak {
            out.push((p, w * v));
        }
    }
    out
}

/// `sum_j G(|y - x_j|) q_j`.
pub fn potential_at(green: &ScaledGreen, sources: &[([f64; 3], f64)], y: &[f64; 3], dim: usize) -> f64 {
    let mut acc = 0.0;
    for (p, q) in sources {
        let mut r2 = 0.0;
        for a in 0..dim {
            let d = y[a] - p[a];
            r2 += d * d;
        }
        acc += q * green.eval(r2.sqrt());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mass(t: &GreenTable) -> f64 {
        // int G dx = 1 / lambda; radial quadrature in log r
        let area = match t.dim {
            1 => 2.0,
            2 => 2.0 * PI,
            _ => 4.0 * PI,
        };
        let dl: f64 = 0.005;
        let mut acc = 0.0;
        let mut x = -12.0 * std::f64::consts::LN_10;
        while x < 8.0 * std::f64::consts::LN_10 {
            let r = x.exp();
            acc += t.g1(r) * r.powi(t.dim as i32) * dl;
            x += dl;
        }
        // tail beyond 1e8 from the leading term
        let (b, p) = t.asymptotic[0];
        let n = t.dim as f64;
        acc += b * 1e8f64.powf(n - p) / (p - n);
        area * acc
    }

    #[test]
    fn green_has_unit_mass() {
        for &(d, s) in &[(1, 0.3), (1, 0.5), (1, 0.7), (2, 0.5), (2, 0.7), (3, 0.7)] {
            let t = green_table(d, s);
            let m = mass(&t);
            assert!((m - 1.0).abs() < 2e-4, "N={d} s={s}: mass {m}");
        }
    }

    #[test]
    fn table_joins_asymptotic_series() {
        for &(d, s) in &[(1, 0.3), (2, 0.5), (2, 0.3), (3, 0.7)] {
            let t = green_table(d, s);
            let r = t.r_max() * 0.999;
            let a: f64 = t.asymptotic.iter().map(|(b, p)| b * r.powf(-p)).sum();
            assert!((t.g1(r) / a - 1.0).abs() < 1e-6, "N={d} s={s}");
        }
    }

    #[test]
    fn benjamin_ono_kernel_matches_fourier_sum() {
        // G(r) = (1/pi) int_0^inf cos(k r) / (k + 1) dk for s = 1/2, N = 1;
        // integrate by parts twice and sum the remainder on a fine grid
        let t = green_table(1, 0.5);
        for &r in &[0.5, 2.0, 7.0] {
            let dk = 1e-3;
            let mut acc = 0.0;
            let kmax: f64 = 4000.0;
            let mut k: f64 = 0.5 * dk;
            while k < kmax {
                acc += (k * r).cos() / (k + 1.0) * dk;
                k += dk;
            }
            // tail: int_K^inf cos(kr)/(k+1) ~ -sin(Kr)/(r(K+1))
            acc -= (kmax * r).sin() / (r * (kmax + 1.0));
            let g = acc / PI;
            assert!((t.g1(r) - g).abs() < 2e-5 * g.abs().max(1.0), "r={r}: {} vs {g}", t.g1(r));
        }
    }

    #[test]
    fn lambda_scaling() {
        let t = green_table(2, 0.5);
        let g = t.scaled(3.0);
        assert!((g.eval(1.7) - t.green(1.7, 3.0)).abs() < 1e-15);
        assert!((g.laplacian(1.7) - t.laplacian(1.7, 3.0)).abs() < 1e-12);
    }
}
