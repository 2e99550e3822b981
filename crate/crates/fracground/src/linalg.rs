//! Thin helpers over `faer` for dense symmetric problems.

use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

/// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix.
pub fn sym_eigen(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::solver(format!("eigendecomposition failed: {e:?}"), None))?;
    let s = e.S().column_vector();
    let vals = (0..a.nrows()).map(|i| s[i]).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn sym_eigenvalues(a: &Mat<f64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::solver(format!("eigenvalues failed: {e:?}"), None))
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn solve(a: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

pub fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    for j in 0..a.ncols() {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        let col = a.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

pub fn column(a: &Mat<f64>, j: usize) -> Vec<f64> {
    let c = a.col(j);
    (0..a.nrows()).map(|i| c[i]).collect()
}

/// Largest absolute asymmetry `|a_ij - a_ji|`.
pub fn asymmetry(a: &Mat<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}
