//! Radial meshes and the spherical-harmonic sector operators `(-Delta_l)^s`.

use crate::error::{Error, Result, invalid};
use crate::linalg;
use faer::Mat;
use serde::{Deserialize, Serialize};

/// Cell-centred mesh on `(0, R)` with weights `r^{N-1} dr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub dim: usize,
    pub radius: f64,
    pub m: usize,
}

impl RadialGrid {
    pub fn new(dim: usize, radius: f64, m: usize) -> Result<RadialGrid> {
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        if !(radius > 0.0) || m < 2 {
            return invalid(format!("radial grid needs R > 0 and m >= 2, got R={radius}, m={m}"));
        }
        Ok(RadialGrid { dim, radius, m })
    }

    pub fn step(&self) -> f64 {
        self.radius / self.m as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.m).map(|j| (j as f64 + 0.5) * h).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        self.nodes().iter().map(|r| r.powi(self.dim as i32 - 1) * h).collect()
    }

    /// Weighted inner product in `L^2(r^{N-1} dr)`.
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights().iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y).sum()
    }
}

/// Multiplicity of degree-`l` spherical harmonics in dimension `N`.
pub fn harmonic_dimension(dim: usize, l: usize) -> usize {
    fn binom(n: i64, k: i64) -> i64 {
        if k < 0 || n < k {
            return 0;
        }
        let mut r = 1i64;
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    }
    let (n, l) = (dim as i64, l as i64);
    (binom(l + n - 1, n - 1) - binom(l + n - 3, n - 1)) as usize
}

/// Dense weight-symmetrised realisation of `(-Delta_l)^s` on a radial grid.
#[derive(Clone, Debug)]
pub struct SectorOperator {
    pub radial_grid: RadialGrid,
    pub l: usize,
    pub s: f64,
    /// Symmetrised operator `W^{1/2} A W^{-1/2}` raised to the power `s`.
    pub matrix: Mat<f64>,
    /// Eigenvalues of the symmetrised base operator `-Delta_l`.
    pub base_eigenvalues: Vec<f64>,
    pub base_eigenvectors: Mat<f64>,
}

/// Second-order flux-form stencil of `-Delta_l`, already symmetrised.
pub fn base_matrix(rg: &RadialGrid, l: usize) -> Mat<f64> {
    let m = rg.m;
    let h = rg.step();
    let n = rg.dim as i32;
    let r = rg.nodes();
    let w: Vec<f64> = rg.weights();
    let face = |j: usize| (j as f64 * h).powi(n - 1);
    // K is the symmetric stiffness matrix; A = W^{-1} K
    let mut k = Mat::<f64>::zeros(m, m);
    for j in 0..m {
        if j + 1 < m {
            let c = face(j + 1) / h;
            k[(j, j)] += c;
            k[(j + 1, j + 1)] += c;
            k[(j, j + 1)] -= c;
            k[(j + 1, j)] -= c;
        }
    }
    // Dirichlet at R through the ghost value -u_{m-1}
    k[(m - 1, m - 1)] += 2.0 * face(m) / h;
    // in one dimension the face at r = 0 carries weight 1; odd degrees
    // reflect oddly (Dirichlet), even degrees evenly (no flux)
    if rg.dim == 1 && l % 2 == 1 {
        k[(0, 0)] += 2.0 / h;
    }
    let cent = (l * (l + rg.dim).saturating_sub(2)) as f64;
    let cent = if rg.dim == 1 { (l as f64) * (l as f64 - 1.0) } else { cent };
    for j in 0..m {
        k[(j, j)] += cent / (r[j] * r[j]) * w[j];
    }
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    Mat::from_fn(m, m, |i, j| k[(i, j)] / (sq[i] * sq[j]))
}

pub fn build_sector_operator(rg: &RadialGrid, l: usize, s: f64) -> Result<SectorOperator> {
    if !(s > 0.0 && s <= 1.0) {
        return invalid(format!("order {s} outside (0,1]"));
    }
    let base = base_matrix(rg, l);
    let asym = linalg::asymmetry(&base);
    if asym > 1e-12 * base.norm_max() {
        return Err(Error::InvalidArgument(format!("sector stencil asymmetric by {asym}")));
    }
    let (vals, vecs) = linalg::sym_eigen(&base)?;
    let m = rg.m;
    let pw: Vec<f64> = vals.iter().map(|v| v.max(0.0).powf(s)).collect();
    // U diag(lambda^s) U^T
    let scaled = Mat::from_fn(m, m, |i, j| vecs[(i, j)] * pw[j]);
    let mut matrix = &scaled * vecs.transpose();
    // enforce exact symmetry against round-off
    for i in 0..m {
        for j in 0..i {
            let a = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = a;
            matrix[(j, i)] = a;
        }
    }
    Ok(SectorOperator {
        radial_grid: rg.clone(),
        l,
        s,
        matrix,
        base_eigenvalues: vals,
        base_eigenvectors: vecs,
    })
}

impl SectorOperator {
    pub fn size(&self) -> usize {
        self.radial_grid.m
    }

    /// Eigenvalues of the operator itself (base eigenvalues to the power s).
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.base_eigenvalues.iter().map(|v| v.max(0.0).powf(self.s)).collect()
    }

    /// Symmetrised matrix of `(-Delta_l)^s + diag(potential)`.
    pub fn with_potential(&self, potential: &[f64]) -> Mat<f64> {
        let mut a = self.matrix.clone();
        for (j, p) in potential.iter().enumerate() {
            a[(j, j)] += p;
        }
        a
    }

    /// Apply the operator to function values (not the symmetrised variable).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let sq: Vec<f64> = self.radial_grid.weights().iter().map(|w| w.sqrt()).collect();
        let g: Vec<f64> = u.iter().zip(&sq).map(|(a, b)| a * b).collect();
        let y = linalg::matvec(&self.matrix, &g);
        y.iter().zip(&sq).map(|(a, b)| a / b).collect()
    }
}
