//! Matrix-free Krylov solvers: restarted GMRES and block LOBPCG.

use crate::error::Result;
use crate::grid::{axpy, dot, norm2};
use crate::linalg;
use faer::Mat;

#[derive(Clone, Debug)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final residual relative to `|b|`.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Restarted GMRES for `A x = b`.
pub fn gmres(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Option<&[f64]>,
    restart: usize,
    max_iter: usize,
    rel_tol: f64,
) -> GmresResult {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = x0.map_or(vec![0.0; n], |v| v.to_vec());
    if bnorm == 0.0 {
        return GmresResult { x: vec![0.0; n], iterations: 0, relative_residual: 0.0, converged: true };
    }
    let mut total = 0;
    let mut rel = f64::INFINITY;
    while total < max_iter {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= rel_tol {
            return GmresResult { x, iterations: total, relative_residual: rel, converged: true };
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut hmat = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            total += 1;
            let mut w = apply(&v[k]);
            for _pass in 0..2 {
                for (j, vj) in v.iter().enumerate() {
                    let hjk = dot(&w, vj);
                    hmat[j][k] += hjk;
                    axpy(-hjk, vj, &mut w);
                }
            }
            let hn = norm2(&w);
            hmat[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * hmat[j][k] + sn[j] * hmat[j + 1][k];
                hmat[j + 1][k] = -sn[j] * hmat[j][k] + cs[j] * hmat[j + 1][k];
                hmat[j][k] = t;
            }
            let den = hmat[k][k].hypot(hmat[k + 1][k]);
            cs[k] = hmat[k][k] / den;
            sn[k] = hmat[k + 1][k] / den;
            hmat[k][k] = den;
            hmat[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= rel_tol || hn == 0.0 || total >= max_iter {
                break;
            }
            v.push(w.iter().map(|wi| wi / hn).collect());
        }
        // back substitution
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in i + 1..k_used {
                acc -= hmat[i][j] * y[j];
            }
            y[i] = acc / hmat[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &v[j], &mut x);
        }
        if rel <= rel_tol {
            // confirm with the true residual on the next pass
            let ax = apply(&x);
            let tr = norm2(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / bnorm;
            return GmresResult { x, iterations: total, relative_residual: tr, converged: tr <= 10.0 * rel_tol };
        }
    }
    GmresResult { x, iterations: total, relative_residual: rel, converged: false }
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// `|A x - theta x|` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub struct LobpcgOptions {
    /// Number of leading pairs that must converge.
    pub wanted: usize,
    pub tol: f64,
    pub max_iter: usize,
}

/// Orthonormalise `cols` against `basis` and among themselves, applying the
/// same linear operations to `images`. Columns that collapse are dropped.
fn orthonormalize(
    basis: &[Vec<f64>],
    cols: &mut Vec<Vec<f64>>,
    images: Option<&mut Vec<Vec<f64>>>,
    basis_images: Option<&[Vec<f64>]>,
) {
    let mut imgs = images;
    let mut keep = vec![true; cols.len()];
    for i in 0..cols.len() {
        let start = norm2(&cols[i]);
        for _pass in 0..2 {
            for (bi, b) in basis.iter().enumerate() {
                let c = dot(&cols[i], b);
                axpy(-c, b, &mut cols[i]);
                if let (Some(im), Some(bim)) = (imgs.as_deref_mut(), basis_images) {
                    axpy(-c, &bim[bi], &mut im[i]);
                }
            }
            for j in 0..i {
                if !keep[j] {
                    continue;
                }
                let c = dot(&cols[i], &cols[j]);
                let (head, tail) = cols.split_at_mut(i);
                axpy(-c, &head[j], &mut tail[0]);
                if let Some(im) = imgs.as_deref_mut() {
                    let (h2, t2) = im.split_at_mut(i);
                    axpy(-c, &h2[j], &mut t2[0]);
                }
            }
        }
        let nn = norm2(&cols[i]);
        if nn <= 1e-10 * start || nn == 0.0 {
            keep[i] = false;
            continue;
        }
        for v in cols[i].iter_mut() {
            *v /= nn;
        }
        if let Some(im) = imgs.as_deref_mut() {
            for v in im[i].iter_mut() {
                *v /= nn;
            }
        }
    }
    let mut idx = 0;
    cols.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });
    if let Some(im) = imgs {
        let mut idx = 0;
        im.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
    }
}

fn combine(cols: &[&Vec<f64>], coef: &Mat<f64>, j: usize, rows: std::ops::Range<usize>) -> Vec<f64> {
    let n = cols[0].len();
    let mut out = vec![0.0; n];
    for (r, c) in rows.enumerate() {
        let a = coef[(c, j)];
        if a != 0.0 {
            axpy(a, cols[r], &mut out);
        }
    }
    out
}

/// Smallest eigenpairs of a symmetric operator by preconditioned LOBPCG.
///
/// `project` maps vectors into an invariant subspace (identity for the full
/// problem); `precond` approximates the inverse of the shifted operator.
pub fn lobpcg(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    project: impl Fn(&[f64]) -> Vec<f64>,
    x0: Vec<Vec<f64>>,
    norm_est: f64,
    opts: &LobpcgOptions,
) -> Result<EigenResult> {
    let mut x: Vec<Vec<f64>> = x0.iter().map(|v| project(v)).collect();
    orthonormalize(&[], &mut x, None, None);
    let k = x.len();
    let mut ax: Vec<Vec<f64>> = x.iter().map(|v| apply(v)).collect();
    let mut p: Vec<Vec<f64>> = Vec::new();
    let mut ap: Vec<Vec<f64>> = Vec::new();
    let mut theta = vec![0.0; k];
    let mut res = vec![f64::INFINITY; k];
    let wanted = opts.wanted.min(k);
    let mut it = 0;
    let mut converged = false;
    while it < opts.max_iter {
        it += 1;
        if it % 25 == 0 {
            // refresh images to stop drift of the tracked products
            orthonormalize(&[], &mut x, None, None);
            ax = x.iter().map(|v| apply(v)).collect();
            p.clear();
            ap.clear();
        }
        // Rayleigh quotients and residuals of the current block
        let mut r: Vec<Vec<f64>> = Vec::with_capacity(k);
        for i in 0..x.len() {
            theta[i] = dot(&x[i], &ax[i]);
            let ri: Vec<f64> = ax[i].iter().zip(&x[i]).map(|(a, b)| a - theta[i] * b).collect();
            res[i] = norm2(&ri);
            r.push(ri);
        }
        if res[..wanted].iter().all(|&v| v <= opts.tol * norm_est) {
            converged = true;
            break;
        }
        let mut w: Vec<Vec<f64>> = r
            .iter()
            .zip(&res)
            .filter(|(_, rn)| **rn > 0.1 * opts.tol * norm_est)
            .map(|(ri, _)| project(&precond(ri)))
            .collect();
        orthonormalize(&x, &mut w, None, None);
        let aw: Vec<Vec<f64>> = w.iter().map(|v| apply(v)).collect();
        let mut basis_x = x.clone();
        basis_x.extend(w.iter().cloned());
        let mut basis_ax = ax.clone();
        basis_ax.extend(aw.iter().cloned());
        orthonormalize(&basis_x, &mut p, Some(&mut ap), Some(&basis_ax));
        let nx = x.len();
        let nw = w.len();
        let np = p.len();
        let s: Vec<&Vec<f64>> = x.iter().chain(w.iter()).chain(p.iter()).collect();
        let as_: Vec<&Vec<f64>> = ax.iter().chain(aw.iter()).chain(ap.iter()).collect();
        let dim = s.len();
        let mut gm = Mat::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let v = 0.5 * (dot(s[i], as_[j]) + dot(s[j], as_[i]));
                gm[(i, j)] = v;
                gm[(j, i)] = v;
            }
        }
        let (_, c) = linalg::sym_eigen(&gm)?;
        let mut nxv = Vec::with_capacity(k);
        let mut naxv = Vec::with_capacity(k);
        let mut npv = Vec::with_capacity(k);
        let mut napv = Vec::with_capacity(k);
        for j in 0..k {
            nxv.push(combine(&s, &c, j, 0..dim));
            naxv.push(combine(&as_, &c, j, 0..dim));
            if nw + np > 0 {
                npv.push(combine(&s[nx..], &c, j, nx..dim));
                napv.push(combine(&as_[nx..], &c, j, nx..dim));
            }
        }
        x = nxv;
        ax = naxv;
        p = npv;
        ap = napv;
    }
    // final exact residuals
    let ax: Vec<Vec<f64>> = x.iter().map(|v| apply(v)).collect();
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = x
        .into_iter()
        .zip(ax)
        .map(|(xi, axi)| {
            let t = dot(&xi, &axi) / dot(&xi, &xi);
            let r = norm2(&axi.iter().zip(&xi).map(|(a, b)| a - t * b).collect::<Vec<_>>()) / norm2(&xi);
            (t, xi, r)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(EigenResult {
        values: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
        iterations: it,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let l = if i == 0 { 0.0 } else { v[i - 1] };
                let r = if i + 1 == n { 0.0 } else { v[i + 1] };
                2.0 * v[i] - l - r + 0.01 * i as f64 * v[i]
            })
            .collect()
    }

    #[test]
    fn gmres_solves_nonsymmetric_system() {
        let n = 60;
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..n).map(|i| 3.0 * v[i] + if i > 0 { v[i - 1] } else { 0.0 } - 0.5 * v[(i + 7) % n]).collect()
        };
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = apply(&xs);
        let out = gmres(apply, &b, None, 20, 500, 1e-12);
        assert!(out.converged);
        let err: f64 = out.x.iter().zip(&xs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "error {err}");
    }

    #[test]
    fn lobpcg_matches_dense_eigenvalues() {
        let n = 80;
        let a = Mat::<f64>::from_fn(n, n, |i, j| {
            let e: Vec<f64> = (0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect();
            laplacian_1d(&e)[i]
        });
        let dense = linalg::sym_eigenvalues(&a).unwrap();
        let x0: Vec<Vec<f64>> = (0..4).map(|c| (0..n).map(|i| ((i * (c + 1)) as f64 * 0.37).sin() + 0.1).collect()).collect();
        let out = lobpcg(
            laplacian_1d,
            |r: &[f64]| r.to_vec(),
            |v: &[f64]| v.to_vec(),
            x0,
            4.0,
            &LobpcgOptions { wanted: 3, tol: 1e-10, max_iter: 2000 },
        )
        .unwrap();
        assert!(out.converged);
        for i in 0..3 {
            assert!((out.values[i] - dense[i]).abs() < 1e-12, "{} vs {}", out.values[i], dense[i]);
        }
    }
}
