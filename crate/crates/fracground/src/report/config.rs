use crate::continuation::{BranchOptions, Parameterization};
use crate::error::{Error, Result};
use crate::ground_state::SolverOptions;
use crate::grid::{Grid, make_grid};
use crate::linearized::SpectrumOptions;
use crate::nonlinearity::NonlinearitySpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// One run, as a single self-describing JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub problem: ProblemBlock,
    pub discretization: DiscretizationBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub dim: usize,
    pub s: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub lambda_range: Option<[f64; 2]>,
    #[serde(default)]
    pub mu_range: Option<[f64; 2]>,
    pub nonlinearity: NonlinearitySpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationBlock {
    /// Half-width `L` of the box `[-L, L)^N`.
    pub half_width: f64,
    pub n: usize,
    /// Sector radius `R`; derived from the state when absent.
    #[serde(default)]
    pub radius: Option<f64>,
    /// Radial cells of the sector decomposition.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_l_max")]
    pub l_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverBlock {
    pub tol: f64,
    pub spectrum_tol: f64,
    pub max_descent: usize,
    pub max_newton: usize,
    pub max_eigen_iterations: usize,
    pub seed: u64,
    /// Random starts of the uniqueness probe; 1 disables it.
    pub trials: usize,
    pub whole_space: bool,
    /// Branch checkpoints; the defaults of the parameterization when absent.
    pub checkpoints: Option<Vec<f64>>,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverBlock {
            tol: d.tol,
            spectrum_tol: SpectrumOptions::default().tol,
            max_descent: d.max_descent,
            max_newton: d.max_newton,
            max_eigen_iterations: SpectrumOptions::default().max_iter,
            seed: 1,
            trials: 1,
            whole_space: true,
            checkpoints: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { directory: PathBuf::from("out"), formats: vec![Format::Json, Format::Csv, Format::Svg] }
    }
}

fn one() -> f64 {
    1.0
}

fn default_m() -> usize {
    SpectrumOptions::default().m
}

fn default_l_max() -> usize {
    SpectrumOptions::default().l_max
}

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn check_range(name: &str, r: &Option<[f64; 2]>) -> Result<()> {
    if let Some([a, b]) = r {
        if !(a.is_finite() && b.is_finite() && *a > 0.0 && b > a) {
            return bad(format!("{name} must satisfy 0 < start < end, got [{a}, {b}]"));
        }
    }
    Ok(())
}

impl RunConfig {
    /// Parse and validate. Whether `f` satisfies the structural hypotheses
    /// is a verification question, not a schema one, and is left to the
    /// commands.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<RunConfig> {
        RunConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not {SCHEMA_VERSION}", self.schema_version));
        }
        let p = &self.problem;
        if !(1..=3).contains(&p.dim) {
            return bad(format!("dim = {} outside 1..=3", p.dim));
        }
        if !(p.s > 0.0 && p.s < 1.0) {
            return bad(format!("s = {} outside (0,1)", p.s));
        }
        if !(p.lambda > 0.0 && p.lambda.is_finite()) {
            return bad(format!("lambda = {} must be positive", p.lambda));
        }
        check_range("lambda_range", &p.lambda_range)?;
        check_range("mu_range", &p.mu_range)?;
        if p.lambda_range.is_some() && p.mu_range.is_some() {
            return bad("give lambda_range or mu_range, not both");
        }
        let d = &self.discretization;
        if !(d.half_width > 0.0 && d.half_width.is_finite()) {
            return bad(format!("half_width = {} must be positive", d.half_width));
        }
        if d.n < 8 || d.n % 2 != 0 {
            return bad(format!("n = {} must be even and at least 8", d.n));
        }
        if d.m == 0 {
            return bad("m must be positive");
        }
        if let Some(r) = d.radius {
            if !(r > 0.0) {
                return bad(format!("radius = {r} must be positive"));
            }
        }
        let sv = &self.solver;
        if !(sv.tol > 0.0 && sv.spectrum_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if sv.max_newton == 0 || sv.max_eigen_iterations == 0 || sv.trials == 0 {
            return bad("iteration limits and trial count must be positive");
        }
        if let Some(c) = &sv.checkpoints {
            if c.iter().any(|x| !(*x > 0.0)) {
                return bad("checkpoints must be positive");
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        let d = &self.discretization;
        make_grid(self.problem.dim, d.half_width, d.n)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            max_descent: self.solver.max_descent,
            max_newton: self.solver.max_newton,
            whole_space: self.solver.whole_space,
            ..SolverOptions::default()
        }
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        let d = &self.discretization;
        SpectrumOptions {
            l_max: d.l_max,
            m: d.m,
            radius: d.radius,
            tol: self.solver.spectrum_tol,
            max_iter: self.solver.max_eigen_iterations,
            ..SpectrumOptions::default()
        }
    }

    /// Parameterization and `[start, end]` of the requested branch.
    pub fn branch_range(&self) -> Result<(Parameterization, f64, f64)> {
        match (self.problem.lambda_range, self.problem.mu_range) {
            (Some([a, b]), None) => Ok((Parameterization::Lambda, a, b)),
            (None, Some([a, b])) => Ok((Parameterization::Mu, a, b)),
            _ => bad("a branch needs lambda_range or mu_range"),
        }
    }

    pub fn branch_options(&self, param: Parameterization) -> BranchOptions {
        let mut o = BranchOptions { parameterization: param, tol: self.solver.tol, ..BranchOptions::default() };
        if param == Parameterization::Mu {
            o.checkpoints = vec![10.0, 100.0, 1000.0];
        }
        if let Some(c) = &self.solver.checkpoints {
            o.checkpoints = c.clone();
        }
        o.whole_space_checkpoints = self.solver.whole_space && param == Parameterization::Lambda;
        o
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}
