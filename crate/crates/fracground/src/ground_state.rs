//! Positive ground states and their a-posteriori diagnostics.

use crate::error::{Error, Result, invalid};
use crate::fractional::FracLaplacian;
use crate::grid::{Field, Grid, dot, norm2, symmetrize};
use crate::krylov::gmres;
use crate::nonlinearity::NonlinearitySpec;
use crate::quad::line_fit;
use crate::sector::RadialGrid;
use crate::special::brent;
use crate::whole_space::{Reconstruction, WholeSpaceState, solve_whole_space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How the iteration is started.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialGuess {
    /// `A (1 + |x|^2)^{-(N+2s)/2}` in units of the natural length.
    Bump,
    /// Superposition of off-centre bumps; descent runs without symmetry.
    Random { seed: u64 },
    /// Newton directly from a given field (continuation corrector).
    #[serde(skip)]
    Given(Field),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative residual target, scaled by `max(1, |u|)`.
    pub tol: f64,
    /// Descent stops once `|u - P f(u)| < descent_tol |u|`.
    pub descent_tol: f64,
    pub max_descent: usize,
    pub max_newton: usize,
    pub halving_budget: usize,
    pub gmres_restart: usize,
    /// Reconstruct the whole-space state and use it for the diagnostics.
    pub whole_space: bool,
    pub init: InitialGuess,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            descent_tol: 1e-4,
            max_descent: 5000,
            max_newton: 40,
            halving_budget: 12,
            gmres_restart: 80,
            whole_space: true,
            init: InitialGuess::Bump,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub pohozaev_residual: f64,
    /// Same identity from the torus norms alone.
    pub pohozaev_torus: f64,
    pub decay_exponent: f64,
    pub decay_r_squared: f64,
    pub asymmetry: f64,
    pub min_value: f64,
    /// Radial profile non-increasing inside the box.
    pub monotone: bool,
    /// `|T + lambda M - V| / V`.
    pub energy_identity: f64,
    /// Nehari scaling `t*` of the converged field.
    pub nehari_t: f64,
    /// Spectral energy fraction in the top quarter of modes.
    pub tail_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateRecord {
    pub field: Field,
    pub dim: usize,
    pub s: f64,
    pub lambda: f64,
    pub spec: NonlinearitySpec,
    pub residual_norm: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub primitive: f64,
    pub energy: f64,
    pub descent_iterations: usize,
    pub newton_iterations: usize,
    pub diagnostics: Diagnostics,
    pub whole_space: Option<WholeSpaceState>,
}

impl GroundStateRecord {
    /// `(M, T, V, int F)` of the best available approximation of the
    /// whole-space state.
    pub fn norms(&self) -> (f64, f64, f64, f64) {
        match &self.whole_space {
            Some(w) => (w.mass, w.kinetic, w.potential, w.primitive),
            None => (self.mass, self.kinetic, self.potential, self.primitive),
        }
    }
}

/// Shared operator state of one `(grid, s, lambda, f)` problem.
pub(crate) struct Problem<'a> {
    pub op: FracLaplacian,
    pub lambda: f64,
    pub spec: &'a NonlinearitySpec,
}

impl<'a> Problem<'a> {
    pub fn new(grid: Grid, s: f64, lambda: f64, spec: &'a NonlinearitySpec) -> Result<Self> {
        Ok(Problem { op: FracLaplacian::new(grid, s)?, lambda, spec })
    }

    fn grid(&self) -> Grid {
        *self.op.grid()
    }

    pub fn gnorm(&self, v: &[f64]) -> f64 {
        norm2(v) * self.grid().weight().sqrt()
    }

    /// `(-Delta)^s u + lambda u - f(u)`.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let au = self.op.apply_shifted(u, self.lambda);
        let fu = self.spec.f_vec(u);
        au.iter().zip(&fu).map(|(a, b)| a - b).collect()
    }

    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        let w = self.grid().weight();
        self.lambda * w * dot(u, u) + self.op.energy(u, u)
    }

    pub fn nehari(&self, u: &[f64]) -> Result<f64> {
        let nsq = self.norm_sq(u);
        nehari_scale(self.spec, u, nsq, self.grid().weight())
    }
}

fn nehari_scale(spec: &NonlinearitySpec, u: &[f64], norm_sq: f64, w: f64) -> Result<f64> {
    if norm_sq <= 0.0 || u.iter().all(|&v| v == 0.0) {
        return Err(Error::NoBracket("zero field has no Nehari scaling".into()));
    }
    if let NonlinearitySpec::PurePower { r } = spec {
        let ir: f64 = w * u.iter().map(|v| v.abs().powf(*r)).sum::<f64>();
        return Ok((norm_sq / ir).powf(1.0 / (r - 2.0)));
    }
    // psi(t) = int f(tu) u / t - |u|^2, increasing in t by (f2)
    let moments: Option<Vec<(f64, f64, f64)>> = match spec {
        NonlinearitySpec::PowerSum { r, terms } => {
            let m = |p: f64| w * u.iter().map(|v| v.abs().powf(p)).sum::<f64>();
            let mut out = vec![(1.0, *r, m(*r))];
            out.extend(terms.iter().map(|t| (t.coef, t.p, m(t.p))));
            Some(out)
        }
        _ => None,
    };
    let psi = |t: f64| match &moments {
        Some(ms) => ms.iter().map(|(c, p, a)| c * t.powf(p - 2.0) * a).sum::<f64>() - norm_sq,
        None => w * u.iter().map(|&v| spec.f(t * v) * v).sum::<f64>() / t - norm_sq,
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut guard = 0;
    while psi(lo) > 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 400 {
            return Err(Error::NoBracket("fibering map has no lower bracket".into()));
        }
    }
    while psi(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 400 {
            return Err(Error::NoBracket("fibering map has no upper bracket".into()));
        }
    }
    brent(psi, lo, hi, 1e-15, 200).ok_or_else(|| Error::NoBracket("Brent failed on fibering map".into()))
}

/// `t*` with `t* u` on the Nehari manifold, and the projected field.
pub fn nehari_project(u: &Field, spec: &NonlinearitySpec, lambda: f64, s: f64) -> Result<(f64, Field)> {
    let p = Problem::new(u.grid, s, lambda, spec)?;
    let t = p.nehari(&u.values)?;
    Ok((t, u.map(|v| t * v)))
}

fn natural_length(lambda: f64, s: f64) -> f64 {
    lambda.powf(-0.5 / s)
}

fn bump(grid: &Grid, s: f64, lambda: f64, centre: &[f64], width: f64) -> Vec<f64> {
    let e = -(grid.dim as f64 + 2.0 * s) / 2.0;
    let ell = natural_length(lambda, s) * width;
    (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            let r2: f64 = (0..grid.dim).map(|a| ((p[a] - centre[a]) / ell).powi(2)).sum();
            (1.0 + r2).powf(e)
        })
        .collect()
}

fn initial_field(grid: &Grid, s: f64, lambda: f64, init: &InitialGuess) -> Vec<f64> {
    match init {
        InitialGuess::Bump => bump(grid, s, lambda, &[0.0; 3], 1.0),
        InitialGuess::Given(f) => f.values.clone(),
        InitialGuess::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let ell = natural_length(lambda, s);
            let count = rng.gen_range(1..=3);
            let mut v = vec![0.0; grid.len()];
            for _ in 0..count {
                let mut c = [0.0; 3];
                for x in c.iter_mut().take(grid.dim) {
                    *x = rng.gen_range(-1.5..1.5) * ell;
                }
                let width = rng.gen_range(0.6..1.8);
                let amp = rng.gen_range(0.3..1.0);
                for (vi, b) in v.iter_mut().zip(bump(grid, s, lambda, &c, width)) {
                    *vi += amp * b;
                }
            }
            // small positive noise keeps the start off any symmetry class
            for vi in v.iter_mut() {
                *vi *= 1.0 + 0.05 * rng.gen_range(-1.0..1.0);
            }
            v
        }
    }
}

/// Nehari-projected preconditioned descent `u <- N((1 - tau) u + tau P f(u))`.
fn descend(p: &Problem, mut u: Vec<f64>, opts: &SolverOptions, symmetric: bool) -> Result<(Vec<f64>, usize)> {
    let grid = p.grid();
    let tau = 0.5;
    let t = p.nehari(&u)?;
    u.iter_mut().for_each(|v| *v *= t);
    for it in 0..opts.max_descent {
        let pf = p.op.resolvent(&p.spec.f_vec(&u), p.lambda);
        let gap = norm2(&u.iter().zip(&pf).map(|(a, b)| a - b).collect::<Vec<_>>());
        if gap < opts.descent_tol * norm2(&u) {
            return Ok((u, it));
        }
        let mut next: Vec<f64> = u.iter().zip(&pf).map(|(a, b)| (1.0 - tau) * a + tau * b).collect();
        if symmetric {
            next = symmetrize(&grid, &next);
        }
        let t = p.nehari(&next)?;
        next.iter_mut().for_each(|v| *v *= t);
        u = next;
    }
    Ok((u, opts.max_descent))
}

/// Newton on `u - P f(u) = 0`, updates restricted to lattice-symmetric fields.
fn newton(p: &Problem, mut u: Vec<f64>, opts: &SolverOptions) -> Result<(Vec<f64>, f64, usize)> {
    let grid = p.grid();
    let mut r = p.residual(&u);
    let mut rn = p.gnorm(&r);
    let target = |u: &[f64]| opts.tol * p.gnorm(u).max(1.0);
    let mut iters = 0;
    while rn > target(&u) {
        if iters >= opts.max_newton {
            return Err(Error::solver(
                format!("Newton did not converge in {iters} steps (residual {rn:e})"),
                Some(Field { grid, values: u }),
            ));
        }
        iters += 1;
        let fp = p.spec.fprime_vec(&u);
        let jac = |v: &[f64]| -> Vec<f64> {
            let q: Vec<f64> = v.iter().zip(&fp).map(|(a, b)| a * b).collect();
            let pq = p.op.resolvent(&q, p.lambda);
            symmetrize(&grid, &v.iter().zip(&pq).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let rhs = symmetrize(&grid, &p.op.resolvent(&r, p.lambda).iter().map(|x| -x).collect::<Vec<_>>());
        let sol = gmres(jac, &rhs, None, opts.gmres_restart, 20 * opts.gmres_restart, 1e-9);
        let delta = symmetrize(&grid, &sol.x);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..opts.halving_budget {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + alpha * d).collect();
            let tr = p.residual(&trial);
            let tn = p.gnorm(&tr);
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
            // round-off floor: accept a residual within a decade of target
            if rn < 10.0 * target(&u) {
                break;
            }
            return Err(Error::solver(
                format!("Newton step halving exhausted at residual {rn:e}"),
                Some(Field { grid, values: u }),
            ));
        }
    }
    Ok((u, rn, iters))
}

/// Compute a positive ground state of `(-Delta)^s u + lambda u = f(u)`.
pub fn solve_ground_state(
    spec: &NonlinearitySpec,
    lambda: f64,
    s: f64,
    dim: usize,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<GroundStateRecord> {
    if grid.dim != dim {
        return invalid(format!("grid dimension {} differs from N = {dim}", grid.dim));
    }
    if !(lambda > 0.0) {
        return invalid(format!("lambda = {lambda} must be positive"));
    }
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("order {s} outside (0,1)"));
    }
    spec.check_admissible(dim, s)?;
    let p = Problem::new(*grid, s, lambda, spec)?;
    let start = initial_field(grid, s, lambda, &opts.init);
    let (u0, descent_iters) = match &opts.init {
        InitialGuess::Given(f) => {
            grid.check_same(&f.grid)?;
            (symmetrize(grid, &start), 0)
        }
        InitialGuess::Bump => descend(&p, start, opts, true)?,
        InitialGuess::Random { .. } => {
            let (u, it) = descend(&p, start, opts, false)?;
            let f = Field::new(*grid, u)?;
            let (c, _, _) = recenter_and_radialize(&f, None)?;
            (symmetrize(grid, &c.values), it)
        }
    };
    let (u, rn, newton_iters) = newton(&p, u0, opts)?;
    let field = Field::new(*grid, u)?;
    finish_record(&p, field, rn, descent_iters, newton_iters, opts)
}

/// Random starts of the uniqueness probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub seeds: Vec<u64>,
    /// Asymmetry of each recentred descent limit, before symmetrisation.
    pub descent_asymmetry: Vec<f64>,
    /// `|u_k - u_0| / |u_0|` of the converged profiles.
    pub spread: Vec<f64>,
    pub max_spread: f64,
}

/// Each seed is descended without any symmetry, recentred at its maximum,
/// then polished by Newton; torus states only.
pub fn uniqueness_probe(
    spec: &NonlinearitySpec,
    lambda: f64,
    s: f64,
    grid: &Grid,
    seeds: &[u64],
    opts: &SolverOptions,
) -> Result<UniquenessReport> {
    if seeds.is_empty() {
        return invalid("the probe needs at least one seed");
    }
    spec.check_admissible(grid.dim, s)?;
    let p = Problem::new(*grid, s, lambda, spec)?;
    let mut descent_asymmetry = Vec::new();
    let mut states: Vec<Vec<f64>> = Vec::new();
    for &seed in seeds {
        let start = initial_field(grid, s, lambda, &InitialGuess::Random { seed });
        let (u, _) = descend(&p, start, opts, false)?;
        let (c, _, asym) = recenter_and_radialize(&Field::new(*grid, u)?, None)?;
        descent_asymmetry.push(asym);
        let (v, _, _) = newton(&p, symmetrize(grid, &c.values), opts)?;
        states.push(v);
    }
    let base = norm2(&states[0]);
    let spread: Vec<f64> = states
        .iter()
        .map(|v| {
            let d: Vec<f64> = v.iter().zip(&states[0]).map(|(a, b)| a - b).collect();
            norm2(&d) / base
        })
        .collect();
    let max_spread = spread.iter().cloned().fold(0.0, f64::max);
    Ok(UniquenessReport { seeds: seeds.to_vec(), descent_asymmetry, spread, max_spread })
}

pub(crate) fn finish_record(
    p: &Problem,
    field: Field,
    residual_norm: f64,
    descent_iterations: usize,
    newton_iterations: usize,
    opts: &SolverOptions,
) -> Result<GroundStateRecord> {
    let grid = field.grid;
    let s = p.op.s;
    let lambda = p.lambda;
    let spec = p.spec;
    let min_value = field.min();
    let peak = field.max();
    if min_value < -1e-10 * peak.abs().max(1e-300) || peak <= 0.0 {
        return Err(Error::solver(
            format!("positivity violated: min {min_value:e}, max {peak:e}"),
            Some(field),
        ));
    }
    let w = grid.weight();
    let u = &field.values.clone();
    let mass = w * dot(u, u);
    let kinetic = p.op.energy(u, u);
    let potential = w * dot(&spec.f_vec(u), u);
    let primitive = w * spec.big_f_vec(u).iter().sum::<f64>();
    let energy = 0.5 * kinetic + 0.5 * lambda * mass - primitive;
    let nehari_t = p.nehari(u)?;
    let (_, _, asymmetry) = recenter_and_radialize(&field, None)?;
    let monotone = profile_monotone(&field);
    let whole_space = if opts.whole_space {
        Some(solve_whole_space(&field, spec, s, lambda, opts.tol, true)?)
    } else {
        None
    };
    let n = grid.dim as f64;
    let pohozaev_torus = pohozaev_value(n, s, lambda, mass, kinetic, primitive);
    let mut rec = GroundStateRecord {
        field,
        dim: grid.dim,
        s,
        lambda,
        spec: spec.clone(),
        residual_norm,
        mass,
        kinetic,
        potential,
        primitive,
        energy,
        descent_iterations,
        newton_iterations,
        diagnostics: Diagnostics {
            pohozaev_residual: f64::NAN,
            pohozaev_torus,
            decay_exponent: f64::NAN,
            decay_r_squared: f64::NAN,
            asymmetry,
            min_value,
            monotone,
            energy_identity: (kinetic + lambda * mass - potential).abs() / potential.abs(),
            nehari_t,
            tail_fraction: p.op.spectral.tail_fraction(u, 0.75),
        },
        whole_space,
    };
    rec.diagnostics.pohozaev_residual = pohozaev_residual(&rec);
    let (lo, hi) = default_decay_window(&rec);
    let (e, r2) = decay_fit(&rec, (lo, hi))?;
    rec.diagnostics.decay_exponent = e;
    rec.diagnostics.decay_r_squared = r2;
    Ok(rec)
}

fn pohozaev_value(n: f64, s: f64, lambda: f64, m: f64, t: f64, f: f64) -> f64 {
    let den = n * lambda * m;
    if den == 0.0 {
        return 0.0;
    }
    ((n - 2.0 * s) * t + n * lambda * m - 2.0 * n * f).abs() / den
}

/// `|(N - 2s) T + N lambda M - 2N int F| / (N lambda M)`.
pub fn pohozaev_residual(rec: &GroundStateRecord) -> f64 {
    let (m, t, _, f) = rec.norms();
    pohozaev_value(rec.dim as f64, rec.s, rec.lambda, m, t, f)
}

/// Window used when none is given: far field of the reconstruction, or the
/// interior band of the box for torus-only records.
pub fn default_decay_window(rec: &GroundStateRecord) -> (f64, f64) {
    let l = rec.field.grid.half_width;
    if rec.whole_space.is_some() { (10.0 * l, 1000.0 * l) } else { (0.2 * l, 0.8 * l) }
}

/// Least-squares slope of `-log u(r)` against `log r` along the first axis.
pub fn decay_fit(rec: &GroundStateRecord, window: (f64, f64)) -> Result<(f64, f64)> {
    let l = rec.field.grid.half_width;
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return invalid(format!("decay window {window:?} is empty"));
    }
    let count = 24;
    let rs: Vec<f64> = (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect();
    let values: Vec<f64> = match &rec.whole_space {
        Some(ws) => {
            if lo < 0.2 * l {
                return invalid(format!("decay window starts inside the core (r < {})", 0.2 * l));
            }
            let recon = Reconstruction::new(&ws.field, &rec.spec, rec.s, rec.lambda);
            rs.iter().map(|&r| recon.eval(&[r, 0.0, 0.0])).collect()
        }
        None => {
            if lo < 0.2 * l || hi > 0.8 * l {
                return invalid(format!("decay window {window:?} outside ({}, {})", 0.2 * l, 0.8 * l));
            }
            let line = axis_line(&rec.field);
            crate::spectral::Spectral::interpolate_line(&rec.field.grid, &line, &rs)
        }
    };
    decay_fit_values(&rs, &values)
}

/// Fit on explicit samples; returns `(exponent, r_squared)`.
pub fn decay_fit_values(rs: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::solver("non-positive tail sample in decay fit", None));
    }
    let x: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (_, slope, r2) = line_fit(&x, &y);
    Ok((-slope, r2))
}

/// Values along the positive first axis through the origin, as a full line.
pub fn axis_line(field: &Field) -> Vec<f64> {
    let g = field.grid;
    let c = g.n / 2;
    (0..g.n)
        .map(|i| {
            let mut ix = [c; 3];
            ix[0] = i;
            field.values[g.ravel(&ix[..g.dim])]
        })
        .collect()
}

/// Shell structure of a centred lattice: `(r_k, members)` ordered by radius.
fn shells(grid: &Grid) -> Vec<(f64, Vec<usize>)> {
    let n = grid.n as i64;
    let h = grid.spacing();
    let mut map: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for idx in 0..grid.len() {
        let ix = grid.unravel(idx);
        let mut q = 0i64;
        for a in 0..grid.dim {
            let o = ix[a] as i64 - n / 2;
            q += o * o;
        }
        map.entry(q).or_default().push(idx);
    }
    map.into_iter().map(|(q, v)| ((q as f64).sqrt() * h, v)).collect()
}

fn profile_monotone(field: &Field) -> bool {
    let l = field.grid.half_width;
    let peak = field.max();
    let mut prev = f64::INFINITY;
    for (r, members) in shells(&field.grid) {
        if r >= l {
            break;
        }
        let avg = members.iter().map(|&i| field.values[i]).sum::<f64>() / members.len() as f64;
        if avg > prev + 1e-12 * peak {
            return false;
        }
        prev = avg;
    }
    true
}

/// Move the maximum to the origin and average over lattice spheres.
///
/// The profile is sampled on `rg` (default: `m = n/2` cells of radius `L`).
pub fn recenter_and_radialize(u: &Field, rg: Option<&RadialGrid>) -> Result<(Field, Vec<f64>, f64)> {
    let g = u.grid;
    let h = g.spacing();
    let sp = crate::spectral::Spectral::new(g);
    let i0 = u.argmax();
    let peak = u.values[i0];
    let ix0 = g.unravel(i0);
    // a second, non-adjacent maximum makes the centre ambiguous
    for (idx, &v) in u.values.iter().enumerate() {
        if idx == i0 || v < peak * (1.0 - 1e-12) {
            continue;
        }
        let ix = g.unravel(idx);
        let far = (0..g.dim).any(|a| {
            let d = (ix[a] as i64 - ix0[a] as i64).rem_euclid(g.n as i64);
            d > 1 && d < g.n as i64 - 1
        });
        if far {
            return Err(Error::InvalidArgument("multiple equal maxima".into()));
        }
    }
    // integer shift to the origin index, then sub-grid refinement
    let mut delta = [0.0; 3];
    for a in 0..g.dim {
        delta[a] = (g.n / 2) as f64 * h - ix0[a] as f64 * h;
    }
    let mut v = sp.shift(&u.values, &delta[..g.dim]);
    // fixed point of the three-point vertex estimate: exact for symmetric peaks
    for _ in 0..60 {
        let c = g.origin();
        let cx = g.unravel(c);
        let mut step = [0.0; 3];
        for a in 0..g.dim {
            let mut lo = cx;
            let mut hi = cx;
            lo[a] -= 1;
            hi[a] += 1;
            let (um, u0, up) = (v[g.ravel(&lo[..g.dim])], v[c], v[g.ravel(&hi[..g.dim])]);
            let den = um - 2.0 * u0 + up;
            if den < 0.0 {
                step[a] = -0.5 * h * (up - um) / den;
            }
        }
        if step.iter().all(|x| x.abs() < 1e-14 * h) {
            break;
        }
        let back: Vec<f64> = step[..g.dim].iter().map(|x| -x).collect();
        v = sp.shift(&v, &back);
    }
    let centred = Field::new(g, v)?;
    let sh = shells(&g);
    let mut radial = vec![0.0; g.len()];
    let mut rk = Vec::with_capacity(sh.len());
    let mut ak = Vec::with_capacity(sh.len());
    for (r, members) in &sh {
        let avg = members.iter().map(|&i| centred.values[i]).sum::<f64>() / members.len() as f64;
        for &i in members {
            radial[i] = avg;
        }
        rk.push(*r);
        ak.push(avg);
    }
    let diff: Vec<f64> = centred.values.iter().zip(&radial).map(|(a, b)| a - b).collect();
    let un = norm2(&centred.values);
    let asymmetry = if un == 0.0 { 0.0 } else { norm2(&diff) / un };
    let default_rg;
    let rg = match rg {
        Some(r) => r,
        None => {
            default_rg = RadialGrid::new(g.dim, g.half_width, g.n / 2)?;
            &default_rg
        }
    };
    let profile = rg.nodes().iter().map(|&r| interp_linear(&rk, &ak, r)).collect();
    Ok((centred, profile, asymmetry))
}

pub(crate) fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let j = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] * (1.0 - t) + ys[j] * t
}

/// Synthetic Gaussian bump for tests and examples.
pub fn gaussian(grid: &Grid, width: f64) -> Field {
    Field::from_fn(*grid, |x| (-x.iter().take(grid.dim).map(|v| v * v).sum::<f64>() / (width * width)).exp())
}

/// Random bump used as a non-solution probe.
pub fn random_bump(grid: &Grid, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.gen_range(0.5..2.0);
    let a = rng.gen_range(0.5..2.0);
    gaussian(grid, w).map(|v| a * v)
}
