//! N-dimensional real FFTs and Fourier multipliers on a periodic grid.

use crate::grid::Grid;
use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub type C64 = Complex64;

/// FFT plans and wavenumber tables for one grid.
///
/// The last axis is transformed real-to-complex, so spectra hold
/// `n^(N-1) * (n/2 + 1)` coefficients.
#[derive(Clone)]
pub struct Spectral {
    pub grid: Grid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// `|k|^2` on the half spectrum.
    pub ksq: Vec<f64>,
    /// Per-axis wavenumbers in FFT order.
    pub k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Spectral {
        let n = grid.n;
        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        let k = grid.wavenumbers();
        let half = n / 2 + 1;
        let len = n.pow(grid.dim as u32 - 1) * half;
        let mut ksq = vec![0.0; len];
        for (idx, v) in ksq.iter_mut().enumerate() {
            let last = idx % half;
            let mut rest = idx / half;
            let mut acc = k[last] * k[last];
            for _ in 0..grid.dim - 1 {
                let j = rest % n;
                rest /= n;
                acc += k[j] * k[j];
            }
            *v = acc;
        }
        Spectral {
            grid,
            r2c: rp.plan_fft_forward(n),
            c2r: rp.plan_fft_inverse(n),
            fwd: cp.plan_fft_forward(n),
            inv: cp.plan_fft_inverse(n),
            ksq,
            k,
        }
    }

    pub fn half(&self) -> usize {
        self.grid.n / 2 + 1
    }

    pub fn spectrum_len(&self) -> usize {
        self.ksq.len()
    }

    /// Multi-index `(j_0, .., j_{N-1})` of a half-spectrum entry.
    pub fn mode_index(&self, idx: usize) -> [usize; 3] {
        let n = self.grid.n;
        let half = self.half();
        let dim = self.grid.dim;
        let mut out = [0usize; 3];
        out[dim - 1] = idx % half;
        let mut rest = idx / half;
        for a in (0..dim - 1).rev() {
            out[a] = rest % n;
            rest /= n;
        }
        out
    }

    /// Plancherel weight of a half-spectrum entry: 2 for interior
    /// columns of the last axis, 1 for the zero and Nyquist columns.
    pub fn column_weight(&self, idx: usize) -> f64 {
        let last = idx % self.half();
        if last == 0 || last == self.grid.n / 2 { 1.0 } else { 2.0 }
    }

    pub fn forward(&self, u: &[f64]) -> Vec<C64> {
        let n = self.grid.n;
        let half = self.half();
        let lines = u.len() / n;
        let mut out = vec![C64::new(0.0, 0.0); lines * half];
        let mut inbuf = vec![0.0; n];
        let mut scratch = self.r2c.make_scratch_vec();
        for l in 0..lines {
            inbuf.copy_from_slice(&u[l * n..(l + 1) * n]);
            self.r2c
                .process_with_scratch(&mut inbuf, &mut out[l * half..(l + 1) * half], &mut scratch)
                .expect("r2c length");
        }
        self.strided_axes(&mut out, true);
        out
    }

    pub fn inverse(&self, mut c: Vec<C64>) -> Vec<f64> {
        let n = self.grid.n;
        let half = self.half();
        self.strided_axes(&mut c, false);
        let lines = c.len() / half;
        let mut out = vec![0.0; lines * n];
        let mut scratch = self.c2r.make_scratch_vec();
        let norm = 1.0 / (self.grid.len() as f64);
        for l in 0..lines {
            let line = &mut c[l * half..(l + 1) * half];
            line[0].im = 0.0;
            line[half - 1].im = 0.0;
            self.c2r
                .process_with_scratch(line, &mut out[l * n..(l + 1) * n], &mut scratch)
                .expect("c2r length");
        }
        for v in out.iter_mut() {
            *v *= norm;
        }
        out
    }

    fn strided_axes(&self, data: &mut [C64], forward: bool) {
        let n = self.grid.n;
        let dim = self.grid.dim;
        if dim == 1 {
            return;
        }
        let half = self.half();
        let plan = if forward { &self.fwd } else { &self.inv };
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..dim - 1 {
            // stride of this axis in the half-spectrum layout
            let stride = half * n.pow((dim - 2 - axis) as u32);
            let block = stride * n;
            let blocks = data.len() / block;
            for b in 0..blocks {
                for off in 0..stride {
                    let base = b * block + off;
                    for (j, x) in buf.iter_mut().enumerate() {
                        *x = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for (j, x) in buf.iter().enumerate() {
                        data[base + j * stride] = *x;
                    }
                }
            }
        }
    }

    /// `F^{-1}[m(k) F[u]]` for a real symbol on the half spectrum.
    pub fn apply_symbol(&self, u: &[f64], symbol: &[f64]) -> Vec<f64> {
        let mut c = self.forward(u);
        for (ci, m) in c.iter_mut().zip(symbol) {
            *ci *= *m;
        }
        self.inverse(c)
    }

    /// `|k|^{2s}` with the zero mode mapped to exactly zero.
    pub fn frac_symbol(&self, s: f64) -> Vec<f64> {
        self.ksq.iter().map(|&q| if q == 0.0 { 0.0 } else { q.powf(s) }).collect()
    }

    /// Signed wavenumber along `axis` of a half-spectrum entry, zero at Nyquist.
    pub fn axis_wavenumber(&self, idx: usize, axis: usize) -> f64 {
        let j = self.mode_index(idx)[axis];
        if j == self.grid.n / 2 { 0.0 } else { self.k[j] }
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, u: &[f64], axis: usize) -> Vec<f64> {
        let mut c = self.forward(u);
        for (idx, ci) in c.iter_mut().enumerate() {
            let kk = self.axis_wavenumber(idx, axis);
            *ci *= C64::new(0.0, kk);
        }
        self.inverse(c)
    }

    /// Translate by `delta` (continuous shift, trigonometric interpolation):
    /// output(x) = u(x - delta).
    pub fn shift(&self, u: &[f64], delta: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let mut c = self.forward(u);
        for (idx, ci) in c.iter_mut().enumerate() {
            let mi = self.mode_index(idx);
            let mut factor = C64::new(1.0, 0.0);
            for a in 0..self.grid.dim {
                let j = mi[a];
                let phase = self.k[j] * delta[a];
                if j == n / 2 {
                    factor *= phase.cos();
                } else {
                    factor *= C64::new(phase.cos(), -phase.sin());
                }
            }
            *ci *= factor;
        }
        self.inverse(c)
    }

    /// Weighted inner product `sum m(k) u^(k) conj(v^(k))`, normalised so
    /// that `m = 1` gives the grid L2 product.
    pub fn spectral_product(&self, uh: &[C64], vh: &[C64], symbol: Option<&[f64]>) -> f64 {
        let mut acc = 0.0;
        for idx in 0..uh.len() {
            let m = symbol.map_or(1.0, |s| s[idx]);
            if m == 0.0 {
                continue;
            }
            acc += self.column_weight(idx) * m * (uh[idx] * vh[idx].conj()).re;
        }
        acc * self.grid.weight() / self.grid.len() as f64
    }

    /// Fraction of spectral energy in modes with some `|k_a|` above
    /// `frac * k_max`; a resolution indicator.
    pub fn tail_fraction(&self, u: &[f64], frac: f64) -> f64 {
        let c = self.forward(u);
        let kmax = std::f64::consts::PI * (self.grid.n / 2) as f64 / self.grid.half_width;
        let mut tail = 0.0;
        let mut total = 0.0;
        for (idx, ci) in c.iter().enumerate() {
            let w = self.column_weight(idx) * ci.norm_sqr();
            total += w;
            let mi = self.mode_index(idx);
            if (0..self.grid.dim).any(|a| self.k[mi[a]].abs() > frac * kmax) {
                tail += w;
            }
        }
        if total == 0.0 { 0.0 } else { (tail / total).sqrt() }
    }

    /// Evaluate the trigonometric interpolant of a 1D line at arbitrary points.
    pub fn interpolate_line(grid: &Grid, line: &[f64], xs: &[f64]) -> Vec<f64> {
        let n = grid.n;
        let sp = Spectral::new(Grid { dim: 1, ..*grid });
        let c = sp.forward(line);
        let x0 = -grid.half_width;
        xs.iter()
            .map(|&x| {
                let mut acc = c[0].re;
                for (j, cj) in c.iter().enumerate().skip(1) {
                    let k = std::f64::consts::PI * j as f64 / grid.half_width;
                    let ph = k * (x - x0);
                    let term = (*cj * C64::new(ph.cos(), ph.sin())).re;
                    acc += if j == n / 2 { term } else { 2.0 * term };
                }
                acc / n as f64
            })
            .collect()
    }
}
