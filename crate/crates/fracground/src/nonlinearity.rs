//! Nonlinearities `f` with `F' = f`, `f'`, and sampled hypothesis checks.

use crate::error::{Result, invalid};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coef: f64,
    pub p: f64,
}

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied nonlinearity on `t >= 0`; must be validated before use.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: Scalar,
    pub fprime: Scalar,
    pub big_f: Scalar,
    pub q: f64,
    pub q0: f64,
    pub r: f64,
    /// Declared Hoelder exponent of `f'`; recorded, never checked.
    pub holder_exponent: Option<f64>,
}

impl std::fmt::Debug for CustomNonlinearity {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("CustomNonlinearity")
            .field("name", &self.name)
            .field("q", &self.q)
            .field("q0", &self.q0)
            .field("r", &self.r)
            .finish()
    }
}

impl PartialEq for CustomNonlinearity {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.f, &other.f)
    }
}

/// The nonlinearity. Leading coefficient is always 1: `f = t^{r-1} + g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearitySpec {
    PurePower {
        r: f64,
    },
    /// `f = t^{r-1} + sum coef t^{p-1}`.
    PowerSum {
        r: f64,
        terms: Vec<PowerTerm>,
    },
    /// `F = t^r / r + coef t^q / (1 + beta t)`.
    RationalExample {
        r: f64,
        q: f64,
        #[serde(default = "one")]
        coef: f64,
        #[serde(default = "one")]
        beta: f64,
    },
    #[serde(skip)]
    Custom(CustomNonlinearity),
}

fn one() -> f64 {
    1.0
}

/// `2^*_s = 2N/(N-2s)` or infinity.
pub fn critical_exponent(dim: usize, s: f64) -> f64 {
    let n = dim as f64;
    if n > 2.0 * s { 2.0 * n / (n - 2.0 * s) } else { f64::INFINITY }
}

impl NonlinearitySpec {
    pub fn pure_power(r: f64) -> Self {
        NonlinearitySpec::PurePower { r }
    }

    /// `t^{q-1} + t^{r-1}` with `q < r`.
    pub fn double_power(q: f64, r: f64) -> Self {
        NonlinearitySpec::PowerSum { r, terms: vec![PowerTerm { coef: 1.0, p: q }] }
    }

    pub fn rational_example(q: f64, r: f64) -> Self {
        NonlinearitySpec::RationalExample { r, q, coef: 1.0, beta: 1.0 }
    }

    pub fn name(&self) -> String {
        match self {
            NonlinearitySpec::PurePower { r } => format!("pure_power(r={r})"),
            NonlinearitySpec::PowerSum { r, terms } => {
                let ps: Vec<String> = terms.iter().map(|t| format!("{}*t^{}", t.coef, t.p - 1.0)).collect();
                format!("power_sum(t^{} + {})", r - 1.0, ps.join(" + "))
            }
            NonlinearitySpec::RationalExample { r, q, .. } => format!("rational_example(q={q}, r={r})"),
            NonlinearitySpec::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Leading exponent `r`.
    pub fn r(&self) -> f64 {
        match self {
            NonlinearitySpec::PurePower { r }
            | NonlinearitySpec::PowerSum { r, .. }
            | NonlinearitySpec::RationalExample { r, .. } => *r,
            NonlinearitySpec::Custom(c) => c.r,
        }
    }

    /// `(q, q0, r)`; pure powers report `q = q0 = r`.
    pub fn exponents(&self) -> (f64, f64, f64) {
        match self {
            NonlinearitySpec::PurePower { r } => (*r, *r, *r),
            NonlinearitySpec::PowerSum { r, terms } => {
                let mut ps: Vec<f64> = terms.iter().map(|t| t.p).collect();
                ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
                ps.dedup();
                let q = ps.first().copied().unwrap_or(*r);
                let q0 = ps.get(1).copied().unwrap_or(0.5 * (q + r));
                (q, q0, *r)
            }
            NonlinearitySpec::RationalExample { r, q, .. } => (*q, 0.5 * (q + r), *r),
            NonlinearitySpec::Custom(c) => (c.q, c.q0, c.r),
        }
    }

    pub fn is_pure_power(&self) -> bool {
        match self {
            NonlinearitySpec::PurePower { .. } => true,
            NonlinearitySpec::PowerSum { terms, .. } => terms.iter().all(|t| t.coef == 0.0),
            _ => false,
        }
    }

    /// Checks `2 < q <= q0 < r < 2^*_s` (pure powers need only `2 < r < 2^*_s`)
    /// and positivity of coefficients.
    pub fn check_admissible(&self, dim: usize, s: f64) -> Result<()> {
        let (q, q0, r) = self.exponents();
        let crit = critical_exponent(dim, s);
        if !(r > 2.0 && r < crit) {
            return invalid(format!("leading exponent r={r} outside (2, {crit})"));
        }
        if !self.is_pure_power() && !(q > 2.0 && q <= q0 && q0 < r) {
            return invalid(format!("exponents q={q}, q0={q0}, r={r} violate 2 < q <= q0 < r"));
        }
        match self {
            NonlinearitySpec::PowerSum { terms, .. } => {
                if terms.iter().any(|t| !(t.coef >= 0.0) || !(t.p > 2.0 && t.p < r)) {
                    return invalid("power-sum terms need nonnegative coefficients and 2 < p < r");
                }
            }
            NonlinearitySpec::RationalExample { coef, beta, q, .. } => {
                if !(*coef >= 0.0 && *beta > 0.0) {
                    return invalid("rational example needs coef >= 0 and beta > 0");
                }
                if !(*q > 3.0) {
                    return invalid(format!("rational example needs q > 3, got {q}"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn f_pos(&self, t: f64) -> f64 {
        match self {
            NonlinearitySpec::PurePower { r } => t.powf(r - 1.0),
            NonlinearitySpec::PowerSum { r, terms } => {
                t.powf(r - 1.0) + terms.iter().map(|c| c.coef * t.powf(c.p - 1.0)).sum::<f64>()
            }
            NonlinearitySpec::RationalExample { r, q, coef, beta } => {
                let d = 1.0 + beta * t;
                t.powf(r - 1.0) + coef * t.powf(q - 1.0) * (q + (q - 1.0) * beta * t) / (d * d)
            }
            NonlinearitySpec::Custom(c) => (c.f)(t),
        }
    }

    fn fprime_pos(&self, t: f64) -> f64 {
        match self {
            NonlinearitySpec::PurePower { r } => (r - 1.0) * t.powf(r - 2.0),
            NonlinearitySpec::PowerSum { r, terms } => {
                (r - 1.0) * t.powf(r - 2.0)
                    + terms.iter().map(|c| c.coef * (c.p - 1.0) * t.powf(c.p - 2.0)).sum::<f64>()
            }
            NonlinearitySpec::RationalExample { r, q, coef, beta } => {
                let d = 1.0 + beta * t;
                let p = q + (q - 1.0) * beta * t;
                let tq1 = t.powf(q - 1.0);
                let g1 = (q - 1.0) * t.powf(q - 2.0) * p / (d * d) + tq1 * (q - 1.0) * beta / (d * d)
                    - 2.0 * beta * tq1 * p / (d * d * d);
                (r - 1.0) * t.powf(r - 2.0) + coef * g1
            }
            NonlinearitySpec::Custom(c) => (c.fprime)(t),
        }
    }

    fn big_f_pos(&self, t: f64) -> f64 {
        match self {
            NonlinearitySpec::PurePower { r } => t.powf(*r) / r,
            NonlinearitySpec::PowerSum { r, terms } => {
                t.powf(*r) / r + terms.iter().map(|c| c.coef * t.powf(c.p) / c.p).sum::<f64>()
            }
            NonlinearitySpec::RationalExample { r, q, coef, beta } => {
                t.powf(*r) / r + coef * t.powf(*q) / (1.0 + beta * t)
            }
            NonlinearitySpec::Custom(c) => (c.big_f)(t),
        }
    }

    /// `f(t)`, extended oddly to `t < 0`.
    pub fn f(&self, t: f64) -> f64 {
        if t >= 0.0 { self.f_pos(t) } else { -self.f_pos(-t) }
    }

    /// `f'(t)`, even extension.
    pub fn fprime(&self, t: f64) -> f64 {
        self.fprime_pos(t.abs())
    }

    /// `F(t) = int_0^t f`, even extension.
    pub fn big_f(&self, t: f64) -> f64 {
        self.big_f_pos(t.abs())
    }

    pub fn f_vec(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&t| self.f(t)).collect()
    }

    pub fn fprime_vec(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&t| self.fprime(t)).collect()
    }

    pub fn big_f_vec(&self, u: &[f64]) -> Vec<f64> {
        u.iter().map(|&t| self.big_f(t)).collect()
    }

    /// `f_mu(t) = mu^{1-r} f(mu t)`, the nonlinearity of the rescaled problem.
    pub fn scaled(&self, mu: f64) -> NonlinearitySpec {
        match self {
            NonlinearitySpec::PurePower { r } => NonlinearitySpec::PurePower { r: *r },
            NonlinearitySpec::PowerSum { r, terms } => NonlinearitySpec::PowerSum {
                r: *r,
                terms: terms.iter().map(|t| PowerTerm { coef: t.coef * mu.powf(t.p - r), p: t.p }).collect(),
            },
            NonlinearitySpec::RationalExample { r, q, coef, beta } => NonlinearitySpec::RationalExample {
                r: *r,
                q: *q,
                coef: coef * mu.powf(q - r),
                beta: beta * mu,
            },
            NonlinearitySpec::Custom(c) => {
                let (f, fp, bf) = (c.f.clone(), c.fprime.clone(), c.big_f.clone());
                let r = c.r;
                NonlinearitySpec::Custom(CustomNonlinearity {
                    name: format!("{}@mu={mu}", c.name),
                    f: Arc::new(move |t| mu.powf(1.0 - r) * f(mu * t)),
                    fprime: Arc::new(move |t| mu.powf(2.0 - r) * fp(mu * t)),
                    big_f: Arc::new(move |t| mu.powf(-r) * bf(mu * t)),
                    q: c.q,
                    q0: c.q0,
                    r,
                    holder_exponent: c.holder_exponent,
                })
            }
        }
    }

    /// The pure power with the same leading exponent.
    pub fn limit_pure_power(&self) -> NonlinearitySpec {
        NonlinearitySpec::PurePower { r: self.r() }
    }
}

pub fn eval_f(spec: &NonlinearitySpec, t: f64) -> f64 {
    spec.f(t)
}

pub fn eval_fprime(spec: &NonlinearitySpec, t: f64) -> f64 {
    spec.fprime(t)
}

#[allow(non_snake_case)]
pub fn eval_F(spec: &NonlinearitySpec, t: f64) -> f64 {
    spec.big_f(t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub pass: bool,
    /// Worst-case margin; negative means violated.
    pub margin: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub spec: String,
    pub samples: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub checks: Vec<HypothesisCheck>,
    /// Best sandwich exponents `min f t / F` and `max f t / F`.
    pub q_best: f64,
    pub r_best: f64,
    /// Smallest `C` with `g <= C (t^{q-1} + t^{q0-1})` on the samples.
    pub c_best: f64,
    pub holder_exponent: Option<f64>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Logarithmic sample grid.
pub fn log_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// Sampled verification of the structural hypotheses. `dim_s` supplies
/// `(N, s)` for the critical-exponent bound; without it only `r < inf` is
/// required.
pub fn validate_hypotheses(spec: &NonlinearitySpec, t_samples: &[f64], dim_s: Option<(usize, f64)>) -> HypothesisReport {
    let mut ts: Vec<f64> = t_samples.iter().cloned().filter(|t| *t > 0.0 && t.is_finite()).collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let f: Vec<f64> = ts.iter().map(|&t| spec.f(t)).collect();
    let fp: Vec<f64> = ts.iter().map(|&t| spec.fprime(t)).collect();
    let bf: Vec<f64> = ts.iter().map(|&t| spec.big_f(t)).collect();
    let (q, q0, r) = spec.exponents();
    let crit = dim_s.map_or(f64::INFINITY, |(n, s)| critical_exponent(n, s));
    let mut checks = Vec::new();

    // (f1): f(t) = o(t) at 0 and f continuous differentiable
    let small = ts.len().min(10).max(1);
    let ratios: Vec<f64> = (0..small).map(|i| f[i] / ts[i]).collect();
    let decreasing = ratios.windows(2).all(|w| w[0] <= w[1] + 1e-15);
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    checks.push(HypothesisCheck {
        name: "f1".into(),
        pass: decreasing && ratios[0].abs() < 1e-2 && f.iter().all(|v| v.is_finite()),
        margin: 1e-2 - ratios[0].abs(),
        detail: format!("f(t)/t at t={:.3e} is {:.3e}; max over smallest samples {:.3e}", ts[0], ratios[0], worst),
    });

    // (f2): f' non-decreasing and f'(t) t > f(t)
    let mut mono = f64::INFINITY;
    for i in 1..ts.len() {
        let scale = fp[i].abs().max(fp[i - 1].abs()).max(f64::MIN_POSITIVE);
        mono = mono.min((fp[i] - fp[i - 1]) / scale);
    }
    let mut strict = f64::INFINITY;
    for i in 0..ts.len() {
        let scale = f[i].abs().max(f64::MIN_POSITIVE);
        strict = strict.min((fp[i] * ts[i] - f[i]) / scale);
    }
    let tol = 1e-9;
    checks.push(HypothesisCheck {
        name: "f2".into(),
        pass: mono >= -tol && strict > tol,
        margin: (mono + tol).min(strict - tol),
        detail: format!("min relative increment of f' {mono:.3e}; min (f't - f)/f {strict:.3e}"),
    });

    // (f3): q F <= f t <= r F with 2 < q, r < 2^*
    let mut q_best = f64::INFINITY;
    let mut r_best: f64 = 0.0;
    for i in 0..ts.len() {
        if bf[i] > 0.0 {
            let ratio = f[i] * ts[i] / bf[i];
            q_best = q_best.min(ratio);
            r_best = r_best.max(ratio);
        }
    }
    checks.push(HypothesisCheck {
        name: "f3".into(),
        pass: q_best > 2.0 + 1e-9 && r_best < crit,
        margin: (q_best - 2.0).min(crit - r_best),
        detail: format!("f t / F in [{q_best:.6}, {r_best:.6}], critical exponent {crit}"),
    });

    // (f4): 0 <= g <= C (t^{q-1} + t^{q0-1}) with g = f - t^{r-1}
    let mut gmin = f64::INFINITY;
    let mut c_best: f64 = 0.0;
    for (i, &t) in ts.iter().enumerate() {
        let lead = t.powf(r - 1.0);
        let g = f[i] - lead;
        let scale = f[i].abs().max(f64::MIN_POSITIVE);
        gmin = gmin.min(g / scale);
        let bound = t.powf(q - 1.0) + t.powf(q0 - 1.0);
        c_best = c_best.max(g / bound);
    }
    checks.push(HypothesisCheck {
        name: "f4".into(),
        pass: gmin >= -1e-12 && c_best.is_finite(),
        margin: gmin,
        detail: format!("min g/f {gmin:.3e}; smallest C {c_best:.6e} with q={q}, q0={q0}, r={r}"),
    });

    let holder = if let NonlinearitySpec::Custom(c) = spec { c.holder_exponent } else { None };
    HypothesisReport {
        spec: spec.name(),
        samples: ts.len(),
        t_min: ts.first().copied().unwrap_or(0.0),
        t_max: ts.last().copied().unwrap_or(0.0),
        checks,
        q_best,
        r_best,
        c_best,
        holder_exponent: holder,
    }
}
