//! Two-point rearrangement across the hyperplane `x_axis = a` and the
//! inequalities it satisfies for the quadratic form of `L+`.

use crate::error::{Result, invalid};
use crate::fractional::cns_constant;
use crate::grid::{Field, Grid, dot};
use crate::ground_state::GroundStateRecord;
use crate::linearized::periodic_kernel_table;
use crate::spectral::Spectral;
use serde::{Deserialize, Serialize};

/// Lattice shift `m = 2a/h`, rejecting offsets off the half-lattice.
fn lattice_shift(g: &Grid, a: f64, axis: usize) -> Result<usize> {
    if axis >= g.dim {
        return invalid(format!("axis {axis} out of range for dimension {}", g.dim));
    }
    let m = 2.0 * a / g.spacing();
    let mr = m.round();
    if !a.is_finite() || (m - mr).abs() > 1e-9 * m.abs().max(1.0) {
        return invalid(format!("offset {a} is not a multiple of h/2 = {}", g.spacing() / 2.0));
    }
    Ok((mr as i64).rem_euclid(g.n as i64) as usize)
}

/// Partner index of `i` under `x -> 2a - x` along one axis, `i' = m - i mod n`.
fn partner(n: usize, m: usize, i: usize) -> usize {
    (m + n - i) % n
}

/// Side of an axis index relative to the hyperplane on the torus: `1` in the
/// open half `x - a in (0, L)`, `-1` in `(-L, 0)`, `0` on either fixed plane.
fn side(g: &Grid, m: usize, i: usize) -> i8 {
    // the plane sits at index (m + n)/2; d = 2i - m - n mod 2n in units of h/2
    let two_n = 2 * g.n;
    let d = (2 * i + g.n - m) % two_n;
    if d == 0 || d == g.n {
        0
    } else if d < g.n {
        1
    } else {
        -1
    }
}

fn check_field(w: &Field, a: f64, axis: usize) -> Result<usize> {
    lattice_shift(&w.grid, a, axis)
}

/// `w(sigma_a x)` with `sigma_a x = (.., 2a - x_axis, ..)`.
pub fn reflect(w: &Field, a: f64, axis: usize) -> Result<Field> {
    let m = check_field(w, a, axis)?;
    let g = w.grid;
    let mut out = vec![0.0; w.values.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let mut ix = g.unravel(idx);
        ix[axis] = partner(g.n, m, ix[axis]);
        *o = w.values[g.ravel(&ix[..g.dim])];
    }
    Field::new(g, out)
}

/// `min(w, w o sigma_a)` on the side `x_axis > a`, `max` on the other side.
pub fn polarize(w: &Field, a: f64, axis: usize) -> Result<Field> {
    let m = check_field(w, a, axis)?;
    let g = w.grid;
    let r = reflect(w, a, axis)?;
    let mut out = w.values.clone();
    for (idx, o) in out.iter_mut().enumerate() {
        let ix = g.unravel(idx);
        match side(&g, m, ix[axis]) {
            1 => *o = o.min(r.values[idx]),
            -1 => *o = o.max(r.values[idx]),
            _ => {}
        }
    }
    Field::new(g, out)
}

/// The lattice Dirichlet form
/// `E_h(v, w) = c/2 h^{2N} sum_{i != j} (v_i - v_j)(w_i - w_j) K(x_i - x_j)`
/// with the periodised kernel in one dimension and the nearest image per
/// axis otherwise. Evaluated as a circular convolution, which is the same
/// double sum.
pub struct LatticeForm {
    spectral: Spectral,
    kernel_hat: Vec<f64>,
    row_sum: f64,
    scale: f64,
}

impl LatticeForm {
    pub fn new(g: Grid, s: f64) -> Result<LatticeForm> {
        let p = g.dim as f64 + 2.0 * s;
        let h = g.spacing();
        let n = g.n;
        let mut k = vec![0.0; g.len()];
        if g.dim == 1 {
            let table = periodic_kernel_table(&g, p);
            for (j, v) in k.iter_mut().enumerate().skip(1) {
                *v = table[j.min(n - j)];
            }
        } else {
            for (idx, v) in k.iter_mut().enumerate().skip(1) {
                let ix = g.unravel(idx);
                let r2: f64 = ix[..g.dim]
                    .iter()
                    .map(|&i| {
                        let d = i.min(n - i) as f64 * h;
                        d * d
                    })
                    .sum();
                *v = r2.powf(-p / 2.0);
            }
        }
        let row_sum: f64 = k.iter().sum();
        let spectral = Spectral::new(g);
        let kernel_hat = spectral.forward(&k).iter().map(|c| c.re).collect();
        let scale = cns_constant(g.dim, s)? * g.weight() * g.weight();
        Ok(LatticeForm { spectral, kernel_hat, row_sum, scale })
    }

    pub fn apply_kernel(&self, v: &[f64]) -> Vec<f64> {
        self.spectral.apply_symbol(v, &self.kernel_hat)
    }

    pub fn form(&self, v: &[f64], w: &[f64]) -> f64 {
        let kw = self.apply_kernel(w);
        self.scale * (self.row_sum * dot(v, w) - dot(v, &kw))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub a: f64,
    pub axis: usize,
    /// `(| |w_a^+|_2 - |w^+|_2 |, | |w_a^-|_2 - |w^-|_2 |)`.
    pub norm_preservation: (f64, f64),
    /// Every reflected pair carries the same two values before and after.
    pub pairs_permuted: bool,
    /// `([w^+]^2 - [w_a^+]^2, [w^-]^2 - [w_a^-]^2)`.
    pub seminorm_drop: (f64, f64),
    /// `(B(w, w^+) - B(w_a, w_a^+), B(w_a, w_a^-) - B(w, w^-))` with
    /// `w^- = min(w, 0)`, so that both are non-negative.
    pub form_inequalities: (f64, f64),
    /// `(int f'(u) ((w_a^+)^2 - (w^+)^2), int f'(u) ((w^-)^2 - (w_a^-)^2))`.
    pub weighted_integral_gaps: (f64, f64),
    /// The gaps above divided by `B`-scale `[w]^2 + lambda |w|^2`.
    pub relative_gaps: Vec<f64>,
    pub min_relative_gap: f64,
    /// Relative difference of the lattice and spectral seminorms of `w`.
    pub calibration: f64,
}

fn parts(v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (v.iter().map(|x| x.max(0.0)).collect(), v.iter().map(|x| (-x).max(0.0)).collect())
}

/// All polarization inequalities for `w` around the state `rec`, with the
/// seminorm evaluated by the lattice double sum.
pub fn polarization_report(rec: &GroundStateRecord, w: &Field, a: f64, axis: usize) -> Result<PolarizationReport> {
    let g = rec.field.grid;
    g.check_same(&w.grid)?;
    if g.dim > 2 {
        return invalid("the lattice double sum is provided for N = 1, 2");
    }
    check_field(w, a, axis)?;
    let wa = polarize(w, a, axis)?;
    let wr = reflect(w, a, axis)?;
    let war = reflect(&wa, a, axis)?;
    let pairs_permuted = (0..g.len()).all(|i| {
        let (p, q) = (w.values[i], wr.values[i]);
        let (pa, qa) = (wa.values[i], war.values[i]);
        (p == pa && q == qa) || (p == qa && q == pa)
    });
    let hw = g.weight();
    let (wp, wm) = parts(&w.values);
    let (wap, wam) = parts(&wa.values);
    let l2 = |v: &[f64]| (hw * dot(v, v)).sqrt();
    let norm_preservation = ((l2(&wap) - l2(&wp)).abs(), (l2(&wam) - l2(&wm)).abs());

    let lf = LatticeForm::new(g, rec.s)?;
    let fp = rec.spec.fprime_vec(&rec.field.values);
    let weighted = |v: &[f64], z: &[f64]| hw * v.iter().zip(z).zip(&fp).map(|((x, y), f)| f * x * y).sum::<f64>();
    let b = |v: &[f64], z: &[f64]| lf.form(v, z) + rec.lambda * hw * dot(v, z) - weighted(v, z);

    let seminorm_drop = (lf.form(&wp, &wp) - lf.form(&wap, &wap), lf.form(&wm, &wm) - lf.form(&wam, &wam));
    let form_inequalities = (b(&w.values, &wp) - b(&wa.values, &wap), b(&w.values, &wm) - b(&wa.values, &wam));
    // wm holds -min(w, 0), hence the order in the second entry
    let weighted_integral_gaps = (weighted(&wap, &wap) - weighted(&wp, &wp), weighted(&wm, &wm) - weighted(&wam, &wam));

    let e_lat = lf.form(&w.values, &w.values);
    let op = crate::fractional::FracLaplacian::new(g, rec.s)?;
    let e_spec = op.energy(&w.values, &w.values);
    let calibration = (e_lat - e_spec).abs() / e_spec.abs().max(f64::MIN_POSITIVE);
    let scale = e_lat.abs() + rec.lambda * hw * dot(&w.values, &w.values);
    let relative_gaps: Vec<f64> = [
        seminorm_drop.0,
        seminorm_drop.1,
        form_inequalities.0,
        form_inequalities.1,
        weighted_integral_gaps.0,
        weighted_integral_gaps.1,
    ]
    .iter()
    .map(|x| x / scale)
    .collect();
    let min_relative_gap = relative_gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(PolarizationReport {
        a,
        axis,
        norm_preservation,
        pairs_permuted,
        seminorm_drop,
        form_inequalities,
        weighted_integral_gaps,
        relative_gaps,
        min_relative_gap,
        calibration,
    })
}

/// Radius of the sign change of a lattice-symmetric field along axis 0,
/// by linear interpolation between the bracketing nodes.
pub fn sign_change_radius(w: &Field) -> Result<f64> {
    let g = w.grid;
    let c = g.n / 2;
    let h = g.spacing();
    let mut ix = [c; 3];
    let at = |i: usize, ix: &mut [usize; 3]| {
        ix[0] = i;
        w.values[g.ravel(&ix[..g.dim])]
    };
    let w0 = at(c, &mut ix);
    for i in 1..c {
        let (p, q) = (at(c + i - 1, &mut ix), at(c + i, &mut ix));
        if p * w0 > 0.0 && q * w0 <= 0.0 {
            return Ok(h * ((i - 1) as f64 + p / (p - q)));
        }
    }
    invalid("field does not change sign along the axis")
}

/// Offsets on the half-lattice near `rho/4, rho/2, 3 rho/4`.
pub fn default_offsets(g: &Grid, rho: f64) -> Vec<f64> {
    let half = g.spacing() / 2.0;
    [0.25, 0.5, 0.75]
        .iter()
        .map(|t| ((t * rho / half).round().max(1.0)) * half)
        .filter(|a| *a < rho)
        .collect()
}

/// `(w_a(x*), w_a(-x*))` at `x* = (rho + 2a) e_1`, with `rho` snapped to
/// the lattice node where `w` is closest to zero.
pub fn star_values(w: &Field, a: f64) -> Result<(f64, f64)> {
    let g = w.grid;
    let rho = sign_change_radius(w)?;
    let h = g.spacing();
    let c = g.n / 2;
    let rho_i = (rho / h).round() as usize;
    let wa = polarize(w, a, 0)?;
    let shift = (2.0 * a / h).round() as usize;
    let mut ix = [c; 3];
    ix[0] = c + rho_i + shift;
    let plus = wa.values[g.ravel(&ix[..g.dim])];
    ix[0] = c - rho_i - shift;
    let minus = wa.values[g.ravel(&ix[..g.dim])];
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn reflection_of_point_mass() {
        let g = make_grid(1, 4.0, 16).unwrap();
        let h = g.spacing();
        let c = g.n / 2;
        let mut v = vec![0.0; g.n];
        v[c + 2] = 1.0;
        let w = Field::new(g, v).unwrap();
        let r = reflect(&w, h, 0).unwrap();
        assert_eq!(r.values[c], 1.0);
        assert_eq!(r.values.iter().sum::<f64>(), 1.0);
        assert!(reflect(&w, 0.3 * h, 0).is_err());
    }

    #[test]
    fn side_of_origin_for_positive_offset() {
        let g = make_grid(1, 4.0, 16).unwrap();
        let c = g.n / 2;
        let m = 2;
        assert_eq!(side(&g, m, c), -1);
        assert_eq!(side(&g, m, c + 1), 0);
        assert_eq!(side(&g, m, c + 2), 1);
    }

    #[test]
    fn sides_partition_pairs() {
        let g = make_grid(1, 4.0, 16).unwrap();
        for m in 0..g.n {
            for i in 0..g.n {
                let j = partner(g.n, m, i);
                assert_eq!(side(&g, m, i), -side(&g, m, j));
                assert_eq!(partner(g.n, m, j), i);
            }
        }
    }
}
