//! Branches of ground states in `lambda` and in the rescaled parameter `mu`.
//!
//! A `lambda`-branch lives on scaled lattices: the state at `lambda` is
//! sampled on the base lattice shrunk by `lambda^{-1/(2s)}`, so that the
//! scaling `T_lambda` is an exact relabelling of lattice values. The
//! `mu`-branch solves the rescaled problem
//! `(-Delta)^s v + v = mu^{1-r} f(mu v)` on the base lattice, which is the
//! same discrete problem after that relabelling.

use crate::error::{Error, Result, invalid};
use crate::fractional::FracLaplacian;
use crate::grid::{Field, Grid, dot, norm2, symmetrize};
use crate::ground_state::{GroundStateRecord, InitialGuess, SolverOptions, solve_ground_state};
use crate::krylov::gmres;
use crate::linearized::lplus_operator;
use crate::nonlinearity::{NonlinearitySpec, critical_exponent};
use crate::spectral::Spectral;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    Lambda,
    Mu,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BranchOptions {
    pub parameterization: Parameterization,
    /// First step as a fraction of the parameter.
    pub step_initial: f64,
    /// Largest step as a fraction of the parameter.
    pub step_cap: f64,
    /// Newton counts at or below this make an easy step.
    pub easy_newton: usize,
    pub max_halvings: usize,
    /// Parameter values the branch must land on.
    pub checkpoints: Vec<f64>,
    pub tol: f64,
    /// Upper estimate of the smallest sector-0 `|eigenvalue|` below which the
    /// predictor refuses to step.
    pub singular_tol: f64,
    /// Largest admissible `max(ratio, 1/ratio)` of the norm monitors.
    pub band_limit: f64,
    /// Reconstruct the whole-space state at checkpoints.
    pub whole_space_checkpoints: bool,
}

impl Default for BranchOptions {
    fn default() -> Self {
        BranchOptions {
            parameterization: Parameterization::Lambda,
            step_initial: 0.1,
            step_cap: 0.5,
            easy_newton: 4,
            max_halvings: 8,
            checkpoints: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            tol: 1e-10,
            singular_tol: 1e-8,
            band_limit: 1e3,
            whole_space_checkpoints: false,
        }
    }
}

/// Norm monitors of one branch point. For a `lambda`-branch `g` is
/// `int f(u) u - 2F(u)`; for a `mu`-branch `k`, `h`, `b` are the rescaled
/// quantities and `g` is `NaN`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMonitors {
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub g: f64,
    pub k: f64,
    pub h: f64,
    pub b: f64,
    /// `V / (lambda M)` and `T / (lambda M)`.
    pub ratio_potential: f64,
    pub ratio_kinetic: f64,
    /// `|u| / |du/dp|`, an upper bound for the smallest sector-0 `|eigenvalue|`.
    pub singular_estimate: f64,
    pub pohozaev: f64,
    pub min_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub parameter: f64,
    pub lambda: f64,
    pub mu: f64,
    pub checkpoint: bool,
    pub record: GroundStateRecord,
    pub monitors: PointMonitors,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    pub from: f64,
    pub to: f64,
    pub accepted: bool,
    pub newton_iterations: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub parameterization: Parameterization,
    /// Leading exponent, `mu = lambda^{1/(r-2)}`.
    pub r: f64,
    pub s: f64,
    /// Lattice of the state at `lambda = 1` (`mu`-branch: every state).
    pub base_grid: Grid,
    pub points: Vec<BranchPoint>,
    pub steps: Vec<StepEntry>,
    /// `max(ratio, 1/ratio)` over all points and both ratios.
    pub band: f64,
}

impl BranchRecord {
    pub fn checkpoints(&self) -> impl Iterator<Item = &BranchPoint> {
        self.points.iter().filter(|p| p.checkpoint)
    }
}

fn lambda_of(mu: f64, r: f64) -> f64 {
    mu.powf(r - 2.0)
}

fn mu_of(lambda: f64, r: f64) -> f64 {
    lambda.powf(1.0 / (r - 2.0))
}

/// Lattice of the state at `lambda` given the lattice at `lambda = 1`.
pub fn scaled_grid(base: &Grid, lambda: f64, s: f64) -> Grid {
    base.scaled(lambda.powf(-0.5 / s))
}

/// Solve `L+ w = rhs` within lattice-symmetric fields, preconditioned by the
/// resolvent.
pub fn solve_lplus(rec: &GroundStateRecord, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
    let lp = lplus_operator(rec)?;
    let g = rec.field.grid;
    let jac = |v: &[f64]| symmetrize(&g, &lp.precondition(&lp.apply(v)));
    let b = symmetrize(&g, &lp.precondition(rhs));
    let sol = gmres(jac, &b, None, 80, 4000, tol);
    if !sol.converged {
        return Err(Error::Branch(format!(
            "sector-0 solve stalled at relative residual {:e}",
            sol.relative_residual
        )));
    }
    Ok(symmetrize(&g, &sol.x))
}

/// `du/dlambda` on the fixed lattice, from `L+ du/dlambda = -u`.
pub fn tangent(rec: &GroundStateRecord, tol: f64) -> Result<Field> {
    let rhs: Vec<f64> = rec.field.values.iter().map(|v| -v).collect();
    Field::new(rec.field.grid, solve_lplus(rec, &rhs, tol)?)
}

/// `x . grad u` by spectral differentiation.
fn radial_derivative(u: &Field) -> Vec<f64> {
    let g = u.grid;
    let sp = Spectral::new(g);
    let mut out = vec![0.0; u.values.len()];
    for axis in 0..g.dim {
        let d = sp.derivative(&u.values, axis);
        for (i, o) in out.iter_mut().enumerate() {
            *o += g.point(i)[axis] * d[i];
        }
    }
    out
}

/// Predicted lattice values at `lambda + d_lambda` on the lattice scaled
/// for `lambda + d_lambda`: `u + d_lambda (du/dlambda - x . grad u / (2 s lambda))`.
pub fn predictor(rec: &GroundStateRecord, d_lambda: f64) -> Result<Field> {
    let g = scaled_grid(&rec.field.grid, (rec.lambda + d_lambda) / rec.lambda, rec.s);
    if d_lambda == 0.0 {
        return Field::new(g, rec.field.values.clone());
    }
    let du = tangent(rec, 1e-10)?;
    let xg = radial_derivative(&rec.field);
    let c = 1.0 / (2.0 * rec.s * rec.lambda);
    let vals = rec.field.values.iter().zip(&du.values).zip(&xg).map(|((u, d), x)| u + d_lambda * (d - c * x)).collect();
    Field::new(g, vals)
}

/// `T_lambda u = lambda^{-1/(r-2)} u(x / lambda^{1/(2s)})` and its inverse,
/// as relabelled lattice values on the lattice stretched by
/// `lambda^{1/(2s)}` (forward) or shrunk by it (inverse).
pub fn t_lambda(u: &Field, lambda: f64, s: f64, r: f64, direction: Direction) -> Result<Field> {
    if !(lambda > 0.0) || !(r > 2.0) {
        return invalid(format!("T_lambda needs lambda > 0 and r > 2, got {lambda}, {r}"));
    }
    let (amp, stretch) = match direction {
        Direction::Forward => (lambda.powf(-1.0 / (r - 2.0)), lambda.powf(0.5 / s)),
        Direction::Inverse => (lambda.powf(1.0 / (r - 2.0)), lambda.powf(-0.5 / s)),
    };
    Field::new(u.grid.scaled(stretch), u.values.iter().map(|v| amp * v).collect())
}

/// Trigonometric interpolation onto another lattice, one axis at a time.
/// Target points outside the source box get zero; a target box that cuts
/// off more than `guard` of the mass is rejected.
pub fn resample(u: &Field, target: &Grid, guard: f64) -> Result<Field> {
    let src = u.grid;
    if src.dim != target.dim {
        return invalid("resampling between dimensions");
    }
    let w = src.weight();
    let total = w * dot(&u.values, &u.values);
    let outside: f64 = w * (0..src.len())
        .filter(|&i| src.point(i)[..src.dim].iter().any(|x| x.abs() >= target.half_width))
        .map(|i| u.values[i] * u.values[i])
        .sum::<f64>();
    if total > 0.0 && outside > guard * total {
        return Err(Error::InvalidArgument(format!(
            "target box truncates a mass fraction {:e} above the guard {guard:e}",
            outside / total
        )));
    }
    // interpolation matrix: target coordinate x_t from source samples
    let xs = target.axis();
    let n = src.n;
    let l = src.half_width;
    let mat: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            if x < -l || x >= l {
                return vec![0.0; n];
            }
            let t = (x + l) / (2.0 * l) * n as f64;
            (0..n).map(|j| periodic_sinc(t - j as f64, n)).collect()
        })
        .collect();
    let mut data = u.values.clone();
    let mut shape = vec![n; src.dim];
    for axis in 0..src.dim {
        let mut new_shape = shape.clone();
        new_shape[axis] = target.n;
        let len: usize = new_shape.iter().product();
        let mut out = vec![0.0; len];
        let stride_in: usize = shape[axis + 1..].iter().product();
        let stride_out: usize = new_shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        for o in 0..outer {
            for inner in 0..stride_in {
                let base_in = o * shape[axis] * stride_in + inner;
                let base_out = o * target.n * stride_out + inner;
                for (t, row) in mat.iter().enumerate() {
                    let mut acc = 0.0;
                    for (j, c) in row.iter().enumerate() {
                        if *c != 0.0 {
                            acc += c * data[base_in + j * stride_in];
                        }
                    }
                    out[base_out + t * stride_out] = acc;
                }
            }
        }
        data = out;
        shape = new_shape;
    }
    Field::new(*target, data)
}

/// Cardinal function of trigonometric interpolation on `n` (even) points,
/// with the Nyquist mode split symmetrically.
fn periodic_sinc(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let a = std::f64::consts::PI * t / nf;
    let sa = a.sin();
    if sa.abs() < 1e-14 {
        let k = (t / nf).round();
        return if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    }
    (nf * a).sin() * a.cos() / (nf * sa)
}

/// Residual `|(-Delta)^s v + v - mu^{1-r} f(mu v)|_2` of the rescaled problem.
pub fn rescaled_residual(v: &Field, mu: f64, spec: &NonlinearitySpec, s: f64) -> Result<f64> {
    let op = FracLaplacian::new(v.grid, s)?;
    let sp = spec.scaled(mu);
    let av = op.apply_shifted(&v.values, 1.0);
    let fv = sp.f_vec(&v.values);
    let r: Vec<f64> = av.iter().zip(&fv).map(|(a, b)| a - b).collect();
    Ok(norm2(&r) * v.grid.weight().sqrt())
}

fn corrector(
    spec: &NonlinearitySpec,
    lambda: f64,
    s: f64,
    guess: Field,
    tol: f64,
    whole_space: bool,
) -> Result<GroundStateRecord> {
    let opts = SolverOptions { tol, whole_space, init: InitialGuess::Given(guess.clone()), ..SolverOptions::default() };
    solve_ground_state(spec, lambda, s, guess.grid.dim, &guess.grid, &opts)
}

fn monitors(rec: &GroundStateRecord, param: Parameterization, singular_estimate: f64) -> PointMonitors {
    let (mass, kinetic, potential, primitive) = rec.norms();
    let lm = rec.lambda * mass;
    let (g, k, h, b) = match param {
        Parameterization::Lambda => (potential - 2.0 * primitive, f64::NAN, f64::NAN, f64::NAN),
        Parameterization::Mu => {
            // rec carries the scaled nonlinearity, so V = k and 2 int F = h
            (f64::NAN, potential, 2.0 * primitive, potential - 2.0 * primitive)
        }
    };
    PointMonitors {
        mass,
        kinetic,
        potential,
        g,
        k,
        h,
        b,
        ratio_potential: potential / lm,
        ratio_kinetic: kinetic / lm,
        singular_estimate,
        pohozaev: rec.diagnostics.pohozaev_residual,
        min_value: rec.diagnostics.min_value,
    }
}

fn band_of(m: &PointMonitors) -> f64 {
    [m.ratio_potential, m.ratio_kinetic].iter().map(|x| x.max(1.0 / x)).fold(1.0, f64::max)
}

/// Predictor-corrector continuation from `start` up to `p_max` in the
/// chosen parameter.
///
/// For `Parameterization::Mu`, `start` solves the rescaled problem at
/// `mu_0 = start.lambda^{...}`: it must carry `lambda = 1` and the
/// nonlinearity `original.scaled(mu_0)`; pass the original in `spec` and
/// `mu_0` as `p_start`. For `Lambda`, `spec` must equal `start.spec`.
pub fn extend_branch(
    start: &GroundStateRecord,
    spec: &NonlinearitySpec,
    p_start: f64,
    p_max: f64,
    opts: &BranchOptions,
) -> Result<BranchRecord> {
    let s = start.s;
    let r = spec.r();
    let param = opts.parameterization;
    match param {
        Parameterization::Lambda => {
            if (start.lambda - p_start).abs() > 1e-12 * p_start {
                return invalid("lambda-branch must start at the record's lambda");
            }
        }
        Parameterization::Mu => {
            if start.lambda != 1.0 {
                return invalid("mu-branch states solve the rescaled problem with lambda = 1");
            }
        }
    }
    if !(p_max > p_start) {
        return invalid(format!("branch end {p_max} must exceed start {p_start}"));
    }
    let base_grid = match param {
        Parameterization::Lambda => start.field.grid.scaled(p_start.powf(0.5 / s)),
        Parameterization::Mu => start.field.grid,
    };
    let mut marks: Vec<f64> = opts.checkpoints.iter().cloned().filter(|c| *c > p_start && *c < p_max).collect();
    marks.push(p_max);
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut steps = Vec::new();
    let mut points = Vec::new();
    let is_mark = |p: f64| opts.checkpoints.iter().any(|c| (c - p).abs() <= 1e-12 * p) || p == p_max;

    let mut current = if opts.whole_space_checkpoints && is_mark(p_start) && start.whole_space.is_none() {
        corrector(&start.spec, start.lambda, s, start.field.clone(), opts.tol, true)?
    } else {
        start.clone()
    };
    let mut p = p_start;
    let mut frac = opts.step_initial;
    let mut easy = 0;
    let mut next_mark = 0;
    loop {
        let (dir, est) = direction(&current, spec, param, p, opts)?;
        let mon = monitors(&current, param, est);
        if band_of(&mon) > opts.band_limit {
            return Err(Error::Branch(format!("norm ratios left the band {} at {p}", opts.band_limit)));
        }
        if current.diagnostics.min_value < -1e-10 * current.field.max() {
            return Err(Error::Branch(format!("state lost positivity at {p}")));
        }
        let (lambda, mu) = match param {
            Parameterization::Lambda => (p, mu_of(p, r)),
            Parameterization::Mu => (lambda_of(p, r), p),
        };
        points.push(BranchPoint { parameter: p, lambda, mu, checkpoint: is_mark(p), record: current.clone(), monitors: mon });
        if next_mark >= marks.len() {
            break;
        }
        // one step, halved on failure
        let target = marks[next_mark];
        let mut dp = (frac * p).min(target - p);
        let mut halvings = 0;
        let (next, reached) = loop {
            let to = p + dp;
            let guess = match param {
                Parameterization::Lambda => {
                    let g = scaled_grid(&current.field.grid, to / p, s);
                    let vals = current.field.values.iter().zip(&dir).map(|(u, d)| u + dp * d).collect();
                    Field::new(g, vals)?
                }
                Parameterization::Mu => Field::new(
                    current.field.grid,
                    current.field.values.iter().zip(&dir).map(|(v, d)| v + dp * d).collect(),
                )?,
            };
            let landing = (to - target).abs() <= 1e-12 * target;
            let ws = opts.whole_space_checkpoints && landing && is_mark(target);
            let attempt = match param {
                Parameterization::Lambda => corrector(spec, to, s, guess, opts.tol, ws),
                Parameterization::Mu => corrector(&spec.scaled(to), 1.0, s, guess, opts.tol, ws),
            };
            match attempt {
                Ok(rec) => {
                    steps.push(StepEntry { from: p, to, accepted: true, newton_iterations: rec.newton_iterations, note: String::new() });
                    break (rec, to);
                }
                Err(e) => {
                    steps.push(StepEntry { from: p, to, accepted: false, newton_iterations: 0, note: e.to_string() });
                    halvings += 1;
                    if halvings > opts.max_halvings {
                        return Err(Error::Branch(format!("corrector failed after {halvings} halvings at {p}: {e}")));
                    }
                    dp *= 0.5;
                    easy = 0;
                }
            }
        };
        let iters = next.newton_iterations;
        if halvings > 0 {
            frac = dp / p;
        }
        if (reached - target).abs() <= 1e-12 * target {
            next_mark += 1;
            p = target;
        } else {
            p = reached;
        }
        current = next;
        if halvings == 0 && iters <= opts.easy_newton {
            easy += 1;
            if easy >= 3 {
                frac = (2.0 * frac).min(opts.step_cap);
                easy = 0;
            }
        }
    }
    let band = points.iter().map(|pt| band_of(&pt.monitors)).fold(1.0, f64::max);
    Ok(BranchRecord { parameterization: param, r, s, base_grid, points, steps, band })
}

/// Lattice-value derivative along the branch and the singularity estimate.
fn direction(
    rec: &GroundStateRecord,
    spec: &NonlinearitySpec,
    param: Parameterization,
    p: f64,
    opts: &BranchOptions,
) -> Result<(Vec<f64>, f64)> {
    let u = &rec.field.values;
    let (dir, rhs_norm) = match param {
        Parameterization::Lambda => {
            let du = tangent(rec, 1e-10)?;
            let xg = radial_derivative(&rec.field);
            let c = 1.0 / (2.0 * rec.s * p);
            let d: Vec<f64> = du.values.iter().zip(&xg).map(|(d, x)| d - c * x).collect();
            let est = norm2(u) / norm2(&du.values).max(f64::MIN_POSITIVE);
            (d, est)
        }
        Parameterization::Mu => {
            // L+ dv/dmu = d/dmu [mu^{1-r} f(mu t)] at t = v
            let r = spec.r();
            let rhs: Vec<f64> = u
                .iter()
                .map(|&v| p.powf(-r) * (spec.fprime(p * v) * p * v + (1.0 - r) * spec.f(p * v)))
                .collect();
            let dv = solve_lplus(rec, &rhs, 1e-10)?;
            let est = norm2(&rhs) / norm2(&dv).max(f64::MIN_POSITIVE);
            (dv, est)
        }
    };
    if rhs_norm < opts.singular_tol {
        return Err(Error::Branch(format!("sector-0 operator nearly singular at {p} (estimate {rhs_norm:e})")));
    }
    Ok((dir, rhs_norm))
}

/// Start of a `mu`-branch: the rescaled problem at `mu_0` on `grid`.
pub fn mu_start(spec: &NonlinearitySpec, mu0: f64, s: f64, grid: &Grid, tol: f64) -> Result<GroundStateRecord> {
    let opts = SolverOptions { tol, whole_space: false, ..SolverOptions::default() };
    solve_ground_state(&spec.scaled(mu0), 1.0, s, grid.dim, grid, &opts)
}

/// Derivative check `g'(lambda) = int u^2` by central differences on the
/// fixed lattice of a `lambda`-branch point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub parameter: f64,
    pub finite_difference: f64,
    pub closed_form: f64,
    pub relative_error: f64,
}

fn g_of(rec: &GroundStateRecord) -> f64 {
    rec.potential - 2.0 * rec.primitive
}

pub fn g_derivative_check(point: &BranchPoint, rel_step: f64, tol: f64) -> Result<DerivativeCheck> {
    let rec = &point.record;
    let dl = rel_step * rec.lambda;
    let lo = corrector(&rec.spec, rec.lambda - dl, rec.s, rec.field.clone(), tol, false)?;
    let hi = corrector(&rec.spec, rec.lambda + dl, rec.s, rec.field.clone(), tol, false)?;
    let fd = (g_of(&hi) - g_of(&lo)) / (2.0 * dl);
    let closed = rec.mass;
    Ok(DerivativeCheck { parameter: rec.lambda, finite_difference: fd, closed_form: closed, relative_error: (fd - closed).abs() / closed.abs() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuMonitors {
    pub mu: f64,
    pub k: f64,
    pub h: f64,
    pub b: f64,
    /// `2 mu^{-(r+1)} int r F(mu v) - f(mu v) mu v`.
    pub b_prime: f64,
    /// Central difference of `B` with step `rel_step mu`, checkpoints only.
    pub b_prime_fd: Option<f64>,
    pub b_prime_error: Option<f64>,
    /// `|int v - mu^{1-r} int f(mu v)| / int v`.
    pub mass_identity: f64,
    /// `|T + M - k| / k`.
    pub energy_identity: f64,
    pub residual: f64,
    pub ratio_tm: f64,
    pub ratio_vm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub points: Vec<MuMonitors>,
    pub b_positive: bool,
    pub b_prime_positive: bool,
    pub max_b_prime_error: f64,
    pub max_mass_identity: f64,
    pub max_energy_identity: f64,
    /// `max(ratio, 1/ratio)` of `T/M`, `V/M` over the branch.
    pub band: f64,
}

fn b_of(v: &[f64], spec: &NonlinearitySpec, mu: f64, w: f64) -> f64 {
    let r = spec.r();
    w * v.iter().map(|&x| mu.powf(-r) * (spec.f(mu * x) * mu * x - 2.0 * spec.big_f(mu * x))).sum::<f64>()
}

/// Monitors of a `mu`-branch; `spec` is the unscaled nonlinearity.
pub fn mu_branch_monitors(branch: &BranchRecord, spec: &NonlinearitySpec, rel_step: f64, tol: f64) -> Result<MonitorReport> {
    if branch.parameterization != Parameterization::Mu {
        return invalid("monitors need a mu-branch");
    }
    if branch.points.len() < 3 {
        return invalid("a mu-branch needs at least 3 points");
    }
    let r = spec.r();
    let s = branch.s;
    let mut out = Vec::new();
    for pt in &branch.points {
        let rec = &pt.record;
        let mu = pt.mu;
        let g = rec.field.grid;
        let w = g.weight();
        let v = &rec.field.values;
        let b = b_of(v, spec, mu, w);
        let b_prime = 2.0 * mu.powf(-(r + 1.0)) * w * v.iter().map(|&x| r * spec.big_f(mu * x) - spec.f(mu * x) * mu * x).sum::<f64>();
        let sv: f64 = w * v.iter().sum::<f64>();
        let sf: f64 = w * v.iter().map(|&x| mu.powf(1.0 - r) * spec.f(mu * x)).sum::<f64>();
        let (b_prime_fd, b_prime_error) = if pt.checkpoint {
            let dm = rel_step * mu;
            let lo = corrector(&spec.scaled(mu - dm), 1.0, s, rec.field.clone(), tol, false)?;
            let hi = corrector(&spec.scaled(mu + dm), 1.0, s, rec.field.clone(), tol, false)?;
            let fd = (b_of(&hi.field.values, spec, mu + dm, w) - b_of(&lo.field.values, spec, mu - dm, w)) / (2.0 * dm);
            (Some(fd), Some((fd - b_prime).abs() / b_prime.abs().max(f64::MIN_POSITIVE)))
        } else {
            (None, None)
        };
        let m = rec.mass;
        let t = rec.kinetic;
        let k = rec.potential;
        out.push(MuMonitors {
            mu,
            k,
            h: 2.0 * rec.primitive,
            b,
            b_prime,
            b_prime_fd,
            b_prime_error,
            mass_identity: (sv - sf).abs() / sv.abs(),
            energy_identity: (t + m - k).abs() / k.abs(),
            residual: rescaled_residual(&rec.field, mu, spec, s)?,
            ratio_tm: t / m,
            ratio_vm: k / m,
        });
    }
    let band = out.iter().flat_map(|m| [m.ratio_tm, m.ratio_vm]).map(|x| x.max(1.0 / x)).fold(1.0, f64::max);
    Ok(MonitorReport {
        b_positive: out.iter().all(|m| m.b > 0.0),
        b_prime_positive: out.iter().all(|m| m.b_prime > 0.0),
        max_b_prime_error: out.iter().filter_map(|m| m.b_prime_error).fold(0.0, f64::max),
        max_mass_identity: out.iter().map(|m| m.mass_identity).fold(0.0, f64::max),
        max_energy_identity: out.iter().map(|m| m.energy_identity).fold(0.0, f64::max),
        band,
        points: out,
    })
}

/// `int |u|^p / (T^a M^{p/2 - a})` with `a = N(p-2)/(4s)`.
pub fn gns_ratio(u: &Field, s: f64, p: f64) -> Result<f64> {
    let g = u.grid;
    let crit = critical_exponent(g.dim, s);
    if !(p > 2.0 && p < crit) {
        return invalid(format!("exponent {p} outside (2, {crit})"));
    }
    let op = FracLaplacian::new(g, s)?;
    let w = g.weight();
    let m = w * dot(&u.values, &u.values);
    let t = op.energy(&u.values, &u.values);
    let ip: f64 = w * u.values.iter().map(|x| x.abs().powf(p)).sum::<f64>();
    let a = g.dim as f64 * (p - 2.0) / (4.0 * s);
    Ok(ip / (t.powf(a) * m.powf(p / 2.0 - a)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub mu: f64,
    pub l2: f64,
    pub hs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitTable {
    pub rows: Vec<LimitRow>,
    /// `d(mu_{i+1}) <= d(mu_i) + tol` along the rows.
    pub monotone: bool,
}

/// Distances `|v_mu - v_*|` in `L^2` and `H^s` at the checkpoints of a
/// `mu`-branch.
pub fn limit_compare(branch: &BranchRecord, v_star: &GroundStateRecord, tol: f64) -> Result<LimitTable> {
    let g = v_star.field.grid;
    let op = FracLaplacian::new(g, branch.s)?;
    let w = g.weight();
    let mut rows = Vec::new();
    for pt in branch.checkpoints() {
        g.check_same(&pt.record.field.grid)?;
        let d: Vec<f64> = pt.record.field.values.iter().zip(&v_star.field.values).map(|(a, b)| a - b).collect();
        let l2sq = w * dot(&d, &d);
        rows.push(LimitRow { mu: pt.mu, l2: l2sq.sqrt(), hs: (l2sq + op.energy(&d, &d)).sqrt() });
    }
    let monotone = rows.windows(2).all(|p| p[1].l2 <= p[0].l2 + tol);
    Ok(LimitTable { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn t_lambda_round_trip() {
        let g = make_grid(1, 10.0, 64).unwrap();
        let u = Field::from_fn(g, |x| (-x[0] * x[0]).exp());
        let v = t_lambda(&u, 3.0, 0.4, 3.5, Direction::Forward).unwrap();
        let back = t_lambda(&v, 3.0, 0.4, 3.5, Direction::Inverse).unwrap();
        assert!((back.grid.half_width - g.half_width).abs() < 1e-12);
        for (a, b) in back.values.iter().zip(&u.values) {
            assert!((a - b).abs() < 1e-15);
        }
        let id = t_lambda(&u, 1.0, 0.4, 3.5, Direction::Forward).unwrap();
        assert_eq!(id, u);
    }

    #[test]
    fn resample_reproduces_band_limited_field() {
        let g = make_grid(1, 8.0, 64).unwrap();
        let k = std::f64::consts::PI / 8.0;
        let u = Field::from_fn(g, |x| (3.0 * k * x[0]).cos() + 0.5 * (5.0 * k * x[0]).sin());
        let t = make_grid(1, 8.0, 96).unwrap();
        let r = resample(&u, &t, 1.0).unwrap();
        for (i, v) in r.values.iter().enumerate() {
            let x = t.coord(i);
            assert!((v - ((3.0 * k * x).cos() + 0.5 * (5.0 * k * x).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn cardinal_function_at_nodes() {
        assert_eq!(periodic_sinc(0.0, 16), 1.0);
        assert!(periodic_sinc(3.0, 16).abs() < 1e-15);
    }
}
