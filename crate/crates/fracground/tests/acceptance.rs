//! The ten acceptance criteria, one line each. Runs the whole sweep, so it
//! takes several minutes in the test profile.

use fracground::continuation::{
    BranchOptions, Direction, Parameterization, extend_branch, g_derivative_check, limit_compare, mu_branch_monitors,
    mu_start, t_lambda,
};
use fracground::ground_state::{GroundStateRecord, InitialGuess, SolverOptions, solve_ground_state, uniqueness_probe};
use fracground::linearized::{
    SpectrumOptions, SpectrumReport, morse_index, picone_identity_check, radial_eigenpairs, random_odd_field,
    spectrum_report,
};
use fracground::polarization::{default_offsets, polarization_report, sign_change_radius};
use fracground::sweep::{SweepPoint, sweep};
use fracground::{NonlinearitySpec, make_grid};
use std::io::Write;
use std::time::{Duration, Instant};

struct State {
    point: SweepPoint,
    rec: GroundStateRecord,
    spectrum: SpectrumReport,
}

type Outcome = Result<String, String>;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn solve_sweep() -> fracground::Result<(Vec<State>, Vec<String>, Duration)> {
    let (points, skipped) = sweep();
    let mut states = Vec::new();
    let mut solve_time = Duration::ZERO;
    for point in points {
        let clock = Instant::now();
        let rec = solve_ground_state(&point.spec, 1.0, point.s, point.dim, &point.grid()?, &SolverOptions::default())?;
        solve_time += clock.elapsed();
        let spectrum = spectrum_report(&rec, &SpectrumOptions::default())?;
        states.push(State { point, rec, spectrum });
    }
    let skipped = skipped.iter().map(|k| format!("N={} s={} {}: {}", k.dim, k.s, k.family.label(), k.reason)).collect();
    Ok((states, skipped, solve_time))
}

fn benjamin_ono() -> Outcome {
    let clock = Instant::now();
    let g = make_grid(1, 200.0, 8192).map_err(|e| e.to_string())?;
    let rec = solve_ground_state(&NonlinearitySpec::pure_power(3.0), 1.0, 0.5, 1, &g, &SolverOptions::default())
        .map_err(|e| e.to_string())?;
    let t = clock.elapsed().as_secs_f64();
    let err = (0..g.n)
        .filter(|&i| g.coord(i).abs() <= 10.0)
        .map(|i| {
            let x = g.coord(i);
            (rec.field.values[i] - 2.0 / (1.0 + x * x)).abs()
        })
        .fold(0.0, f64::max)
        / 2.0;
    let detail = format!("relative Linf error {err:.2e} on |x| <= 10, {t:.1} s");
    if err < 1e-3 && t < 60.0 { Ok(detail) } else { Err(detail) }
}

fn pohozaev(states: &[State], solve_time: Duration) -> Outcome {
    let worst = states.iter().map(|s| s.rec.diagnostics.pohozaev_residual).fold(0.0, f64::max);
    let bad: Vec<String> = states
        .iter()
        .filter(|s| !(s.rec.diagnostics.pohozaev_residual < 1e-6))
        .map(|s| format!("{} {:.2e}", s.point.label(), s.rec.diagnostics.pohozaev_residual))
        .collect();
    let t = solve_time.as_secs_f64();
    let detail = format!("{} states, worst residual {worst:.2e}, solves {t:.0} s", states.len());
    if bad.is_empty() && t < 600.0 { Ok(detail) } else { Err(format!("{detail}; failing {bad:?}")) }
}

fn nondegeneracy(states: &[State]) -> Outcome {
    let mut bad = Vec::new();
    let mut margin = f64::INFINITY;
    for st in states {
        let r = &st.spectrum;
        let n = st.point.dim;
        let mut why = Vec::new();
        if morse_index(r) != (1, 1) {
            why.push(format!("morse {:?}", morse_index(r)));
        }
        if r.kernel_dimension != n || !(r.kernel_alignment > 0.999) {
            why.push(format!("kernel {} alignment {:.6}", r.kernel_dimension, r.kernel_alignment));
        }
        if !r.sector0_kernel.is_empty() {
            why.push(format!("sector-0 kernel {:?}", r.sector0_kernel));
        }
        match (n, r.l2_margin) {
            (1, _) => {}
            (_, Some(m)) if m > 0.0 => margin = margin.min(m),
            (_, m) => why.push(format!("l=2 margin {m:?}")),
        }
        if !why.is_empty() {
            bad.push(format!("{}: {}", st.point.label(), why.join(", ")));
        }
    }
    let detail = format!("{} states, smallest l=2 margin (N=2) {margin:.3e}; N=1 has no l=2 sector", states.len());
    if bad.is_empty() { Ok(detail) } else { Err(format!("{detail}; {bad:?}")) }
}

fn oscillation(states: &[State], log: &mut Vec<String>) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for st in states {
        let Some(r2) = &st.spectrum.radial_second else {
            bad.push(format!("{}: no second radial eigenvalue", st.point.label()));
            continue;
        };
        if !r2.below_edge {
            log.push(format!(
                "criterion 4 skips {}: second radial eigenvalue {:.4} is not below lambda = {}",
                st.point.label(),
                r2.value,
                st.rec.lambda
            ));
            continue;
        }
        checked += 1;
        if r2.sign_changes != 1 || !(r2.psi_at_origin < 0.0) {
            bad.push(format!("{}: {} sign changes, psi(0) {:.3e}", st.point.label(), r2.sign_changes, r2.psi_at_origin));
        }
    }
    let detail = format!("{checked} states with one node and psi(0) < 0, {} skipped", states.len() - checked - bad.len());
    if bad.is_empty() { Ok(detail) } else { Err(format!("{detail}; {bad:?}")) }
}

fn polarization(states: &[State]) -> Outcome {
    let mut worst_gap = f64::INFINITY;
    let mut worst_norm = 0.0f64;
    let mut bad = Vec::new();
    let mut count = 0;
    for st in states {
        let (_, _, _, phi2) = radial_eigenpairs(&st.rec, &SpectrumOptions::default()).map_err(|e| e.to_string())?;
        let rho = match sign_change_radius(&phi2) {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("{}: {e}", st.point.label()));
                continue;
            }
        };
        let offsets = default_offsets(&phi2.grid, rho);
        if offsets.len() != 3 {
            bad.push(format!("{}: {} offsets below rho = {rho}", st.point.label(), offsets.len()));
        }
        let scale = phi2.grid.weight().sqrt() * fracground::grid::norm2(&phi2.values);
        for a in offsets {
            let r = polarization_report(&st.rec, &phi2, a, 0).map_err(|e| e.to_string())?;
            count += 1;
            let norm = r.norm_preservation.0.max(r.norm_preservation.1) / scale;
            worst_norm = worst_norm.max(norm);
            worst_gap = worst_gap.min(r.min_relative_gap);
            if !(norm < 1e-12) || !(r.min_relative_gap >= -1e-6) {
                bad.push(format!("{} a={a:.4}: norm {norm:.1e}, gap {:.2e}", st.point.label(), r.min_relative_gap));
            }
        }
    }
    let detail = format!("{count} offsets, worst L2 change {worst_norm:.1e}, smallest gap {worst_gap:.2e}");
    if bad.is_empty() { Ok(detail) } else { Err(format!("{detail}; {bad:?}")) }
}

fn picone(states: &[State]) -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut worst_h = f64::INFINITY;
    let mut bad = Vec::new();
    let mut count = 0;
    for st in states.iter().filter(|s| s.point.dim == 1) {
        for seed in 0..10 {
            let w = random_odd_field(&st.rec, seed);
            let p = picone_identity_check(&st.rec, &w).map_err(|e| e.to_string())?;
            count += 1;
            worst_gap = worst_gap.max(p.relative_gap);
            worst_h = worst_h.min(p.min_h);
            if !(p.relative_gap < 1e-3) || !(p.min_h >= -1e-9) {
                bad.push(format!("{} seed {seed}: gap {:.2e}, min H {:.2e}", st.point.label(), p.relative_gap, p.min_h));
            }
        }
    }
    let detail = format!("{count} odd fields, worst relative gap {worst_gap:.2e}, min H {worst_h:.2e}");
    if bad.is_empty() { Ok(detail) } else { Err(format!("{detail}; {bad:?}")) }
}

fn torus() -> SolverOptions {
    SolverOptions { whole_space: false, ..SolverOptions::default() }
}

fn lambda_branch() -> fracground::Result<Outcome> {
    let s = 0.5;
    let spec = NonlinearitySpec::double_power(4.0, 6.0);
    let start = solve_ground_state(&spec, 1.0, s, 1, &make_grid(1, 50.0, 8192)?, &torus())?;
    let br = match extend_branch(&start, &spec, 1.0, 100.0, &BranchOptions::default()) {
        Ok(b) => b,
        Err(e) => return Ok(Err(format!("double-power branch stopped: {e}"))),
    };
    let mut why = Vec::new();
    let reached = br.points.last().map(|p| p.lambda).unwrap_or(0.0);
    if (reached - 100.0).abs() > 1e-9 || !br.points.windows(2).all(|w| w[1].lambda > w[0].lambda) {
        why.push(format!("branch ends at {reached}"));
    }
    if !br.points.windows(2).all(|w| w[1].monitors.g >= w[0].monitors.g) {
        why.push("g decreases".to_string());
    }
    let mut worst_fd = 0.0f64;
    for p in br.checkpoints() {
        worst_fd = worst_fd.max(g_derivative_check(p, 1e-3, 1e-12)?.relative_error);
    }
    if !(worst_fd < 1e-3) {
        why.push(format!("g' error {worst_fd:.2e}"));
    }
    let opts = BranchOptions::default();
    if !(br.band <= opts.band_limit) {
        why.push(format!("ratio band {:.3e}", br.band));
    }

    let pure = NonlinearitySpec::pure_power(3.0);
    let base = solve_ground_state(&pure, 1.0, s, 1, &make_grid(1, 100.0, 8192)?, &torus())?;
    let pb = extend_branch(&base, &pure, 1.0, 100.0, &opts)?;
    let peak = base.field.max();
    let mut worst_cov = 0.0f64;
    for p in pb.checkpoints() {
        let back = t_lambda(&p.record.field, p.lambda, s, 3.0, Direction::Forward)?;
        let err = back.values.iter().zip(&base.field.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
        worst_cov = worst_cov.max(err);
    }
    if !(worst_cov < 1e-6) {
        why.push(format!("covariance error {worst_cov:.2e}"));
    }
    let detail = format!(
        "{} points to lambda = {reached}, ratio band {:.3}, g' error {worst_fd:.2e}, covariance {worst_cov:.2e}",
        br.points.len(),
        br.band
    );
    Ok(if why.is_empty() { Ok(detail) } else { Err(format!("{detail}; {why:?}")) })
}

fn mu_branch() -> fracground::Result<Outcome> {
    let s = 0.5;
    let grid = make_grid(1, 50.0, 8192)?;
    let spec = NonlinearitySpec::double_power(4.0, 6.0);
    let opts = BranchOptions {
        parameterization: Parameterization::Mu,
        checkpoints: vec![10.0, 100.0, 1000.0],
        ..BranchOptions::default()
    };
    let v0 = mu_start(&spec, 1.0, s, &grid, opts.tol)?;
    let br = extend_branch(&v0, &spec, 1.0, 1000.0, &opts)?;
    let mon = mu_branch_monitors(&br, &spec, 0.01, 1e-13)?;
    let v_star = solve_ground_state(&spec.limit_pure_power(), 1.0, s, 1, &grid, &torus())?;
    let table = limit_compare(&br, &v_star, 0.0)?;
    let last = table.rows.last().map(|r| r.l2).unwrap_or(f64::NAN);
    let mut why = Vec::new();
    if !(mon.b_positive) {
        why.push("B <= 0".to_string());
    }
    if !(mon.max_b_prime_error < 1e-3) {
        why.push(format!("B' error {:.2e}", mon.max_b_prime_error));
    }
    if !(mon.max_mass_identity <= opts.tol) {
        why.push(format!("mass identity {:.2e} above {:.0e}", mon.max_mass_identity, opts.tol));
    }
    if !table.monotone || table.rows.len() != 3 || !(last < 0.05) {
        why.push(format!("limit distances {:?}", table.rows.iter().map(|r| r.l2).collect::<Vec<_>>()));
    }
    let dists: Vec<String> = table.rows.iter().map(|r| format!("{:.3e}", r.l2)).collect();
    let detail = format!(
        "B' error {:.2e}, mass identity {:.1e}, |v_mu - v_*|_2 at 10, 100, 1000: {}",
        mon.max_b_prime_error,
        mon.max_mass_identity,
        dists.join(", ")
    );
    Ok(if why.is_empty() { Ok(detail) } else { Err(format!("{detail}; {why:?}")) })
}

fn uniqueness(states: &[State]) -> fracground::Result<Outcome> {
    let seeds: Vec<u64> = (1..=8).collect();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for st in states {
        let p = &st.point;
        match uniqueness_probe(&p.spec, 1.0, p.s, &p.grid()?, &seeds, &torus()) {
            Ok(r) => {
                worst = worst.max(r.max_spread);
                if !(r.max_spread < 1e-4) {
                    bad.push(format!("{}: spread {:.2e}", p.label(), r.max_spread));
                }
            }
            Err(e) => bad.push(format!("{}: {e}", p.label())),
        }
    }

    let spec = NonlinearitySpec::double_power(4.0, 6.0);
    let g = make_grid(1, 50.0, 8192)?;
    let mut branches = Vec::new();
    for seed in [11, 12] {
        let opts = SolverOptions { init: InitialGuess::Random { seed }, ..torus() };
        let start = solve_ground_state(&spec, 1.0, 0.5, 1, &g, &opts)?;
        branches.push(extend_branch(&start, &spec, 1.0, 100.0, &BranchOptions::default())?);
    }
    let mut branch_gap = 0.0f64;
    for (a, b) in branches[0].checkpoints().zip(branches[1].checkpoints()) {
        let d = a.record.field.values.iter().zip(&b.record.field.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        branch_gap = branch_gap.max(d / max_abs(&a.record.field.values));
    }
    if !(branch_gap < 1e-6) {
        bad.push(format!("seeded branches differ by {branch_gap:.2e}"));
    }
    let detail = format!(
        "{} states x 8 seeds, worst spread {worst:.2e}; seeded branches differ by {branch_gap:.2e}",
        states.len()
    );
    Ok(if bad.is_empty() { Ok(detail) } else { Err(format!("{detail}; {bad:?}")) })
}

fn decay(states: &[State]) -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for st in states {
        let want = st.point.dim as f64 + 2.0 * st.point.s;
        let got = st.rec.diagnostics.decay_exponent;
        worst = worst.max((got - want).abs());
        if !((got - want).abs() <= 0.15) {
            bad.push(format!("{}: {got:.3} vs {want:.1}", st.point.label()));
        }
    }
    let detail = format!("{} states, largest deviation from N+2s {worst:.3}", states.len());
    if bad.is_empty() { Ok(detail) } else { Err(format!("{detail}; {bad:?}")) }
}

fn flatten(r: fracground::Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| Err(format!("error: {e}")))
}

fn main() {
    let clock = Instant::now();
    let mut out = std::io::stdout().lock();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut log = Vec::new();
    let mut report = |n: usize, name: &'static str, o: Outcome, out: &mut std::io::StdoutLock| {
        let (tag, text) = match &o {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(out, "criterion {n:>2} {tag} {name}: {text}").unwrap();
        results.push((n, name, o));
    };

    report(1, "Benjamin-Ono oracle", benjamin_ono(), &mut out);
    match solve_sweep() {
        Ok((states, skipped, solve_time)) => {
            for k in &skipped {
                writeln!(out, "sweep skips {k}").unwrap();
            }
            report(2, "Pohozaev suite", pohozaev(&states, solve_time), &mut out);
            report(3, "non-degeneracy suite", nondegeneracy(&states), &mut out);
            let osc = oscillation(&states, &mut log);
            for l in &log {
                writeln!(out, "{l}").unwrap();
            }
            report(4, "oscillation", osc, &mut out);
            report(5, "polarization", polarization(&states), &mut out);
            report(6, "Picone", picone(&states), &mut out);
            report(7, "lambda branch", flatten(lambda_branch()), &mut out);
            report(8, "mu branch", flatten(mu_branch()), &mut out);
            report(9, "uniqueness probe", flatten(uniqueness(&states)), &mut out);
            report(10, "decay", decay(&states), &mut out);
        }
        Err(e) => {
            for (n, name) in [
                (2, "Pohozaev suite"),
                (3, "non-degeneracy suite"),
                (4, "oscillation"),
                (5, "polarization"),
                (6, "Picone"),
                (9, "uniqueness probe"),
                (10, "decay"),
            ] {
                report(n, name, Err(format!("sweep failed: {e}")), &mut out);
            }
            report(7, "lambda branch", flatten(lambda_branch()), &mut out);
            report(8, "mu branch", flatten(mu_branch()), &mut out);
        }
    }
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    writeln!(out, "acceptance: {} of {} criteria pass ({:.0} s)", results.len() - failed, results.len(), clock.elapsed().as_secs_f64())
        .unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
