use super::config::{Format, RunConfig};
use super::output::{CsvTable, atomic_write, fmt_number, to_json};
use super::svg::{Plot, Series, Style};
use crate::continuation::{
    BranchRecord, DerivativeCheck, LimitTable, MonitorReport, Parameterization, extend_branch, g_derivative_check,
    limit_compare, mu_branch_monitors, mu_start,
};
use crate::error::Result;
use crate::ground_state::{
    Diagnostics, GroundStateRecord, SolverOptions, UniquenessReport, axis_line, default_decay_window,
    solve_ground_state, uniqueness_probe,
};
use crate::linearized::{
    IdentityCheck, LminusReport, PiconeCheck, SpectrumReport, lminus_check, morse_index, picone_identity_check,
    radial_eigenpairs, random_odd_field, second_eigfn_identity_check, spectrum_report,
};
use crate::whole_space::Reconstruction;
use crate::nonlinearity::{HypothesisReport, log_samples, validate_hypotheses};
use crate::polarization::{PolarizationReport, default_offsets, polarization_report, sign_change_radius};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Thresholds of the certification suite.
pub const POHOZAEV_TOL: f64 = 1e-6;
pub const DECAY_TOL: f64 = 0.15;
pub const ALIGNMENT_MIN: f64 = 0.999;
pub const GAP_TOL: f64 = -1e-6;
pub const PICONE_REL: f64 = 1e-3;
pub const PICONE_H_MIN: f64 = -1e-9;
pub const IDENTITY_TOL: f64 = 1e-6;
pub const UNIQUENESS_TOL: f64 = 1e-4;
pub const PICONE_FIELDS: u64 = 10;

/// One failed assertion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    pub bound: String,
}

/// Everything in a ground-state record except the fields themselves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub dim: usize,
    pub s: f64,
    pub lambda: f64,
    pub nonlinearity: String,
    pub half_width: f64,
    pub n: usize,
    pub residual_norm: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub primitive: f64,
    pub energy: f64,
    pub peak: f64,
    pub descent_iterations: usize,
    pub newton_iterations: usize,
    pub diagnostics: Diagnostics,
    /// `(mass, kinetic, potential, primitive, residual)` of the whole-space state.
    pub whole_space: Option<[f64; 5]>,
}

impl SolveSummary {
    pub fn of(rec: &GroundStateRecord) -> SolveSummary {
        SolveSummary {
            dim: rec.dim,
            s: rec.s,
            lambda: rec.lambda,
            nonlinearity: rec.spec.name(),
            half_width: rec.field.grid.half_width,
            n: rec.field.grid.n,
            residual_norm: rec.residual_norm,
            mass: rec.mass,
            kinetic: rec.kinetic,
            potential: rec.potential,
            primitive: rec.primitive,
            energy: rec.energy,
            peak: rec.field.max(),
            descent_iterations: rec.descent_iterations,
            newton_iterations: rec.newton_iterations,
            diagnostics: rec.diagnostics.clone(),
            whole_space: rec.whole_space.as_ref().map(|w| [w.mass, w.kinetic, w.potential, w.primitive, w.residual]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub hypotheses: HypothesisReport,
    pub solve: Option<SolveSummary>,
    pub spectrum: Option<SpectrumReport>,
    /// `(mu, mu_rad)`.
    pub morse: Option<(usize, usize)>,
    pub radial_second_value: Option<f64>,
    pub identity: Option<IdentityCheck>,
    pub polarization: Vec<PolarizationReport>,
    pub lminus: Option<LminusReport>,
    pub picone: Vec<PiconeCheck>,
    pub uniqueness: Option<UniquenessReport>,
    /// Checks that do not apply, with the reason.
    pub skipped: Vec<String>,
    pub failures: Vec<Failure>,
    pub pass: bool,
}

struct Checks(Vec<Failure>);

impl Checks {
    fn below(&mut self, check: &str, value: f64, bound: f64) {
        if !(value < bound) {
            self.0.push(Failure { check: check.into(), value, bound: format!("< {}", fmt_number(bound)) });
        }
    }

    fn at_least(&mut self, check: &str, value: f64, bound: f64) {
        if !(value >= bound) {
            self.0.push(Failure { check: check.into(), value, bound: format!(">= {}", fmt_number(bound)) });
        }
    }

    fn equal(&mut self, check: &str, value: usize, want: usize) {
        if value != want {
            self.0.push(Failure { check: check.into(), value: value as f64, bound: format!("== {want}") });
        }
    }

    fn holds(&mut self, check: &str, ok: bool) {
        if !ok {
            self.0.push(Failure { check: check.into(), value: 0.0, bound: "true".into() });
        }
    }
}

fn hypotheses(cfg: &RunConfig) -> HypothesisReport {
    let p = &cfg.problem;
    validate_hypotheses(&p.nonlinearity, &log_samples(1e-6, 1e6, 400), Some((p.dim, p.s)))
}

pub fn solve(cfg: &RunConfig) -> Result<GroundStateRecord> {
    let p = &cfg.problem;
    solve_ground_state(&p.nonlinearity, p.lambda, p.s, p.dim, &cfg.grid()?, &cfg.solver_options())
}

/// Run the certification suite for one parameter point. `Err` is an
/// operational failure; failed assertions are listed in the report.
pub fn verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let p = &cfg.problem;
    let mut c = Checks(Vec::new());
    let hyp = hypotheses(cfg);
    let mut report = VerifyReport {
        hypotheses: hyp.clone(),
        solve: None,
        spectrum: None,
        morse: None,
        radial_second_value: None,
        identity: None,
        polarization: Vec::new(),
        lminus: None,
        picone: Vec::new(),
        uniqueness: None,
        skipped: Vec::new(),
        failures: Vec::new(),
        pass: false,
    };
    for h in hyp.checks.iter().filter(|h| !h.pass) {
        c.0.push(Failure { check: format!("hypothesis {}", h.name), value: h.margin, bound: ">= 0".into() });
    }
    if let Err(e) = p.nonlinearity.check_admissible(p.dim, p.s) {
        c.0.push(Failure { check: format!("admissibility: {e}"), value: p.nonlinearity.r(), bound: "admissible".into() });
    }
    if !c.0.is_empty() {
        report.failures = c.0;
        return Ok(report);
    }

    let rec = solve(cfg)?;
    let d = &rec.diagnostics;
    let target = p.dim as f64 + 2.0 * p.s;
    c.below("pohozaev residual", d.pohozaev_residual, POHOZAEV_TOL);
    c.below("decay exponent offset", (d.decay_exponent - target).abs(), DECAY_TOL);
    c.below("energy identity", d.energy_identity, IDENTITY_TOL);
    report.solve = Some(SolveSummary::of(&rec));

    let sopts = cfg.spectrum_options();
    let spec_rep = spectrum_report(&rec, &sopts)?;
    let (mu, mu_rad) = morse_index(&spec_rep);
    c.equal("morse index", mu, 1);
    c.equal("radial morse index", mu_rad, 1);
    c.holds("eigenvalue count complete", spec_rep.count_complete);
    c.equal("kernel dimension", spec_rep.kernel_dimension, p.dim);
    c.at_least("kernel alignment", spec_rep.kernel_alignment, ALIGNMENT_MIN);
    c.equal("sector-0 kernel", spec_rep.sector0_kernel.len(), 0);
    match spec_rep.l2_margin {
        Some(m) => c.at_least("sector l=2 margin", m, f64::MIN_POSITIVE),
        None => report.skipped.push("sector l=2 margin: no l=2 sector in one dimension".into()),
    }
    match &spec_rep.radial_second {
        Some(r2) if r2.below_edge => {
            c.equal("radial second eigenfunction sign changes", r2.sign_changes, 1);
            c.below("radial second eigenfunction at origin", r2.psi_at_origin, 0.0);
        }
        Some(r2) => report
            .skipped
            .push(format!("oscillation: second sector-0 eigenvalue {} is not below lambda = {}", r2.value, p.lambda)),
        None => report.skipped.push("oscillation: no second sector-0 eigenvalue computed".into()),
    }
    report.morse = Some((mu, mu_rad));
    report.spectrum = Some(spec_rep);

    let (_, _, mu2, phi2) = radial_eigenpairs(&rec, &sopts)?;
    report.radial_second_value = Some(mu2);
    let id = second_eigfn_identity_check(&rec, &phi2, mu2)?;
    c.below("second eigenfunction identity (+)", id.res_plus, IDENTITY_TOL);
    c.below("second eigenfunction identity (-)", id.res_minus, IDENTITY_TOL);
    report.identity = Some(id);
    if p.dim <= 2 {
        match sign_change_radius(&phi2) {
            Ok(rho) => {
                for a in default_offsets(&phi2.grid, rho) {
                    let pr = polarization_report(&rec, &phi2, a, 0)?;
                    let name = format!("polarization a={}", fmt_number(a));
                    c.below(&format!("{name} norm preservation"), pr.norm_preservation.0.max(pr.norm_preservation.1), 1e-12);
                    c.at_least(&format!("{name} gap"), pr.min_relative_gap, GAP_TOL);
                    report.polarization.push(pr);
                }
            }
            Err(_) => c.holds("second radial eigenfunction changes sign", false),
        }
    } else {
        report.skipped.push("polarization: lattice double sum provided for N <= 2".into());
    }

    let lm = lminus_check(&rec, &sopts)?;
    c.below("L- residual", lm.residual, IDENTITY_TOL);
    c.holds("L- ground state positive", lm.positive);
    c.at_least("L- gap", lm.gap, f64::MIN_POSITIVE);
    report.lminus = Some(lm);

    if p.dim == 1 {
        for k in 0..PICONE_FIELDS {
            let w = random_odd_field(&rec, cfg.solver.seed.wrapping_add(k));
            let pc = picone_identity_check(&rec, &w)?;
            c.below(&format!("picone field {k} relative gap"), pc.relative_gap, PICONE_REL);
            c.at_least(&format!("picone field {k} min H"), pc.min_h, PICONE_H_MIN);
            report.picone.push(pc);
        }
    } else {
        report.skipped.push("picone: one-dimensional check".into());
    }

    if cfg.solver.trials > 1 {
        let seeds: Vec<u64> = (0..cfg.solver.trials as u64).map(|k| cfg.solver.seed.wrapping_add(k)).collect();
        let opts = SolverOptions { whole_space: false, ..cfg.solver_options() };
        let u = uniqueness_probe(&p.nonlinearity, p.lambda, p.s, &cfg.grid()?, &seeds, &opts)?;
        c.below("uniqueness spread", u.max_spread, UNIQUENESS_TOL);
        report.uniqueness = Some(u);
    }
    report.pass = c.0.is_empty();
    report.failures = c.0;
    Ok(report)
}

/// Points `(r, u(r))` along the first axis, `r >= 0`.
fn axis_profile(field: &crate::grid::Field) -> Vec<(f64, f64)> {
    let g = field.grid;
    let line = axis_line(field);
    (g.n / 2..g.n).map(|i| (g.coord(i), line[i])).collect()
}

fn profile_outputs(cfg: &RunConfig, dir: &Path, rec: &GroundStateRecord) -> Result<()> {
    let torus = axis_profile(&rec.field);
    let free = rec.whole_space.as_ref().map(|w| axis_profile(&w.field));
    if cfg.wants(Format::Csv) {
        let mut t = CsvTable::new(&["r", "u_torus", "u_whole_space"]);
        for (k, (r, u)) in torus.iter().enumerate() {
            let w = free.as_ref().map_or(f64::NAN, |f| f[k].1);
            t.push_numbers(&[*r, *u, w]);
        }
        atomic_write(&dir.join("profile.csv"), t.render().as_bytes())?;
    }
    if cfg.wants(Format::Svg) {
        let mut series = vec![Series::new("torus", torus.clone(), Style::Line)];
        if let Some(f) = &free {
            series.push(Series::new("whole space", f.clone(), Style::Line));
        }
        let plot = Plot {
            title: format!("radial profile, N={} s={} lambda={}", rec.dim, rec.s, rec.lambda),
            x_label: "r".into(),
            y_label: "u(r)".into(),
            series,
            ..Plot::default()
        };
        atomic_write(&dir.join("profile.svg"), plot.render().as_bytes())?;
        let tail_src = free.unwrap_or(torus);
        let tail: Vec<(f64, f64)> = tail_src.into_iter().filter(|(r, u)| *r > 0.0 && *u > 0.0).collect();
        let (lo, hi) = default_decay_window(rec);
        let p = rec.diagnostics.decay_exponent;
        let mut series = vec![Series::new("u on the box", tail.clone(), Style::Line)];
        let far: Vec<(f64, f64)> = match &rec.whole_space {
            Some(ws) => {
                let recon = Reconstruction::new(&ws.field, &rec.spec, rec.s, rec.lambda);
                (0..24)
                    .map(|i| lo * (hi / lo).powf(i as f64 / 23.0))
                    .map(|r| (r, recon.eval(&[r, 0.0, 0.0])))
                    .filter(|(_, u)| *u > 0.0)
                    .collect()
            }
            None => tail.iter().cloned().filter(|(r, _)| *r >= lo && *r <= hi).collect(),
        };
        if let (Some(&(r0, u0)), Some(&(r1, _))) = (far.first(), far.last()) {
            let fit = [r0, r1].iter().map(|&r| (r, u0 * (r / r0).powf(-p))).collect();
            series.push(Series::new("fit window", far.clone(), Style::Markers));
            series.push(Series::new(&format!("slope -{p:.3}"), fit, Style::Line));
        }
        let plot = Plot {
            title: "tail".into(),
            x_label: "r".into(),
            y_label: "u(r)".into(),
            log_x: true,
            log_y: true,
            series,
            ..Plot::default()
        };
        atomic_write(&dir.join("tail.svg"), plot.render().as_bytes())?;
    }
    Ok(())
}

fn out_dir(cfg: &RunConfig) -> &Path {
    &cfg.output.directory
}

fn report_error(e: &crate::Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_ERROR
}

pub fn cmd_solve(cfg: &RunConfig) -> i32 {
    let run = || -> Result<SolveSummary> {
        let rec = solve(cfg)?;
        let dir = out_dir(cfg);
        let summary = SolveSummary::of(&rec);
        if cfg.wants(Format::Json) {
            atomic_write(&dir.join("record.json"), to_json(&rec)?.as_bytes())?;
            atomic_write(&dir.join("summary.json"), to_json(&summary)?.as_bytes())?;
        }
        profile_outputs(cfg, dir, &rec)?;
        Ok(summary)
    };
    match run() {
        Ok(s) => {
            println!("residual {}", fmt_number(s.residual_norm));
            println!("pohozaev {}", fmt_number(s.diagnostics.pohozaev_residual));
            println!("decay    {}", fmt_number(s.diagnostics.decay_exponent));
            EXIT_PASS
        }
        Err(e) => report_error(&e),
    }
}

fn spectrum_outputs(cfg: &RunConfig, rep: &SpectrumReport, lambda: f64) -> Result<()> {
    let dir = out_dir(cfg);
    if cfg.wants(Format::Json) {
        atomic_write(&dir.join("spectrum.json"), to_json(rep)?.as_bytes())?;
    }
    if cfg.wants(Format::Csv) {
        let mut t = CsvTable::new(&["sector", "index", "value"]);
        for (k, v) in rep.full_values.iter().enumerate() {
            t.push(vec!["full".into(), k.to_string(), fmt_number(*v)]);
        }
        for sec in &rep.sectors {
            for (k, v) in sec.values.iter().enumerate() {
                t.push(vec![sec.l.to_string(), k.to_string(), fmt_number(*v)]);
            }
        }
        atomic_write(&dir.join("spectrum.csv"), t.render().as_bytes())?;
    }
    if cfg.wants(Format::Svg) {
        let pts = rep
            .sectors
            .iter()
            .flat_map(|sec| sec.values.iter().filter(|v| **v < 1.5 * lambda).map(move |v| (sec.l as f64, *v)))
            .collect();
        let plot = Plot {
            title: "sector spectra of L+".into(),
            x_label: "harmonic degree l".into(),
            y_label: "eigenvalue".into(),
            series: vec![Series::new("eigenvalues", pts, Style::Rungs)],
            h_lines: vec![(0.0, "0".into()), (lambda, "lambda".into())],
            ..Plot::default()
        };
        atomic_write(&dir.join("spectrum.svg"), plot.render().as_bytes())?;
    }
    Ok(())
}

pub fn cmd_spectrum(cfg: &RunConfig, record_path: &Path) -> i32 {
    let run = || -> Result<(usize, usize, usize)> {
        let rec: GroundStateRecord = serde_json::from_str(&std::fs::read_to_string(record_path)?)?;
        let rep = spectrum_report(&rec, &cfg.spectrum_options())?;
        spectrum_outputs(cfg, &rep, rec.lambda)?;
        let (mu, mu_rad) = morse_index(&rep);
        Ok((mu, mu_rad, rep.kernel_dimension))
    };
    match run() {
        Ok((mu, mu_rad, k)) => {
            println!("morse index {mu}, radial {mu_rad}, kernel dimension {k}");
            EXIT_PASS
        }
        Err(e) => report_error(&e),
    }
}

/// Manifest written next to the branch table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchManifest {
    pub config: RunConfig,
    pub parameterization: Parameterization,
    pub r: f64,
    pub s: f64,
    pub points: usize,
    pub band: f64,
    pub steps: Vec<crate::continuation::StepEntry>,
    pub g_derivative: Vec<DerivativeCheck>,
    pub mu_monitors: Option<MonitorReport>,
    pub limit: Option<LimitTable>,
    pub files: Vec<String>,
}

pub fn branch(cfg: &RunConfig) -> Result<(BranchRecord, BranchManifest)> {
    let p = &cfg.problem;
    let (param, a, b) = cfg.branch_range()?;
    let opts = cfg.branch_options(param);
    let grid = cfg.grid()?;
    let torus = SolverOptions { whole_space: false, ..cfg.solver_options() };
    let mut manifest = BranchManifest {
        config: cfg.clone(),
        parameterization: param,
        r: p.nonlinearity.r(),
        s: p.s,
        points: 0,
        band: 0.0,
        steps: Vec::new(),
        g_derivative: Vec::new(),
        mu_monitors: None,
        limit: None,
        files: Vec::new(),
    };
    let br = match param {
        Parameterization::Lambda => {
            let start = solve_ground_state(&p.nonlinearity, a, p.s, p.dim, &grid, &torus)?;
            let br = extend_branch(&start, &p.nonlinearity, a, b, &opts)?;
            for pt in br.checkpoints() {
                manifest.g_derivative.push(g_derivative_check(pt, 1e-3, 1e-12)?);
            }
            br
        }
        Parameterization::Mu => {
            let start = mu_start(&p.nonlinearity, a, p.s, &grid, opts.tol)?;
            let br = extend_branch(&start, &p.nonlinearity, a, b, &opts)?;
            manifest.mu_monitors = Some(mu_branch_monitors(&br, &p.nonlinearity, 0.01, 1e-13)?);
            if !p.nonlinearity.is_pure_power() {
                let v_star = solve_ground_state(&p.nonlinearity.limit_pure_power(), 1.0, p.s, p.dim, &grid, &torus)?;
                manifest.limit = Some(limit_compare(&br, &v_star, 1e-8)?);
            }
            br
        }
    };
    manifest.points = br.points.len();
    manifest.band = br.band;
    manifest.steps = br.steps.clone();
    Ok((br, manifest))
}

pub fn branch_table(br: &BranchRecord) -> CsvTable {
    let mut t = CsvTable::new(&[
        "parameter",
        "lambda",
        "mu",
        "checkpoint",
        "mass",
        "kinetic",
        "potential",
        "g",
        "k",
        "h",
        "b",
        "ratio_potential",
        "ratio_kinetic",
        "singular_estimate",
        "pohozaev",
        "min_value",
    ]);
    for p in &br.points {
        let m = &p.monitors;
        let mut row: Vec<String> = [p.parameter, p.lambda, p.mu].iter().map(|x| fmt_number(*x)).collect();
        row.push(if p.checkpoint { "1" } else { "0" }.into());
        for x in [
            m.mass,
            m.kinetic,
            m.potential,
            m.g,
            m.k,
            m.h,
            m.b,
            m.ratio_potential,
            m.ratio_kinetic,
            m.singular_estimate,
            m.pohozaev,
            m.min_value,
        ] {
            row.push(fmt_number(x));
        }
        t.push(row);
    }
    t
}

pub fn cmd_branch(cfg: &RunConfig) -> i32 {
    let run = || -> Result<BranchManifest> {
        let (br, mut manifest) = branch(cfg)?;
        let dir = out_dir(cfg);
        if cfg.wants(Format::Csv) {
            atomic_write(&dir.join("branch.csv"), branch_table(&br).render().as_bytes())?;
            manifest.files.push("branch.csv".into());
        }
        if cfg.wants(Format::Svg) {
            let pick = |f: fn(&crate::continuation::PointMonitors) -> f64| {
                br.points.iter().map(|p| (p.parameter, f(&p.monitors))).collect::<Vec<_>>()
            };
            let plot = Plot {
                title: "branch monitors".into(),
                x_label: match br.parameterization {
                    Parameterization::Lambda => "lambda".into(),
                    Parameterization::Mu => "mu".into(),
                },
                y_label: "ratio".into(),
                log_x: true,
                series: vec![
                    Series::new("V / (lambda M)", pick(|m| m.ratio_potential), Style::Line),
                    Series::new("T / (lambda M)", pick(|m| m.ratio_kinetic), Style::Line),
                ],
                ..Plot::default()
            };
            atomic_write(&dir.join("branch.svg"), plot.render().as_bytes())?;
            manifest.files.push("branch.svg".into());
        }
        if cfg.wants(Format::Json) {
            manifest.files.push("branch.json".into());
            atomic_write(&dir.join("branch.json"), to_json(&manifest)?.as_bytes())?;
        }
        Ok(manifest)
    };
    match run() {
        Ok(m) => {
            println!("{} points, band {}", m.points, fmt_number(m.band));
            EXIT_PASS
        }
        Err(e) => report_error(&e),
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> i32 {
    let run = || -> Result<VerifyReport> {
        let rep = verify(cfg)?;
        if cfg.wants(Format::Json) {
            atomic_write(&out_dir(cfg).join("verify.json"), to_json(&rep)?.as_bytes())?;
        }
        Ok(rep)
    };
    match run() {
        Ok(rep) if rep.pass => {
            println!("all assertions pass");
            for s in &rep.skipped {
                println!("skipped: {s}");
            }
            EXIT_PASS
        }
        Ok(rep) => {
            println!("{}", to_json(&rep.failures).unwrap_or_default().trim_end());
            EXIT_FAIL
        }
        Err(e) => report_error(&e),
    }
}

/// Margin table of the hypothesis checks.
pub fn margin_table(rep: &HypothesisReport) -> CsvTable {
    let mut t = CsvTable::new(&["check", "pass", "margin", "detail"]);
    for c in &rep.checks {
        t.push(vec![c.name.clone(), c.pass.to_string(), fmt_number(c.margin), c.detail.clone()]);
    }
    t
}

pub fn cmd_validate_f(cfg: &RunConfig) -> i32 {
    let rep = hypotheses(cfg);
    let run = || -> Result<()> {
        let dir = out_dir(cfg);
        if cfg.wants(Format::Json) {
            atomic_write(&dir.join("hypotheses.json"), to_json(&rep)?.as_bytes())?;
        }
        if cfg.wants(Format::Csv) {
            atomic_write(&dir.join("hypotheses.csv"), margin_table(&rep).render().as_bytes())?;
        }
        Ok(())
    };
    if let Err(e) = run() {
        return report_error(&e);
    }
    println!("{:<28} {:>5} {:>24}", "check", "pass", "margin");
    for c in &rep.checks {
        println!("{:<28} {:>5} {:>24}", c.name, c.pass, fmt_number(c.margin));
    }
    if rep.all_pass() { EXIT_PASS } else { EXIT_FAIL }
}
