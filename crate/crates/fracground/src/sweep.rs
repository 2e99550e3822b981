//! Parameter points of the certification sweep `{N=1,2} x {s} x {family}`.
//!
//! The nominal exponents are `f = u^2` (pure power), `f = u^3 + u^5` and the
//! rational example with `(q, r) = (4, 6)`. Where these leave `(2, 2*_s)`, or
//! where the state concentrates below what a uniform grid of tolerable size
//! resolves, smaller admissible exponents are used and the point records why.

use crate::grid::{Grid, make_grid};
use crate::error::Result;
use crate::nonlinearity::{NonlinearitySpec, critical_exponent};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PurePower,
    DoublePower,
    Rational,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::PurePower, Family::DoublePower, Family::Rational];

    pub fn label(self) -> &'static str {
        match self {
            Family::PurePower => "pure",
            Family::DoublePower => "double",
            Family::Rational => "rational",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub dim: usize,
    pub s: f64,
    pub family: Family,
    pub spec: NonlinearitySpec,
    pub half_width: f64,
    pub n: usize,
    /// Reason the nominal exponents were replaced, if they were.
    pub adapted: Option<String>,
}

impl SweepPoint {
    pub fn grid(&self) -> Result<Grid> {
        make_grid(self.dim, self.half_width, self.n)
    }

    pub fn label(&self) -> String {
        format!("N={} s={} {}", self.dim, self.s, self.family.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub dim: usize,
    pub s: f64,
    pub family: Family,
    pub reason: String,
}

pub const SWEEP_S: [f64; 3] = [0.3, 0.5, 0.7];

fn nominal(family: Family) -> NonlinearitySpec {
    match family {
        Family::PurePower => NonlinearitySpec::pure_power(3.0),
        Family::DoublePower => NonlinearitySpec::double_power(4.0, 6.0),
        Family::Rational => NonlinearitySpec::rational_example(4.0, 6.0),
    }
}

/// Exponents, box and resolution for one point, or the reason it is skipped.
pub fn sweep_point(dim: usize, s: f64, family: Family) -> std::result::Result<SweepPoint, SkippedPoint> {
    use Family::*;
    let crit = critical_exponent(dim, s);
    let key = (dim, (s * 10.0).round() as i32, family);
    let (spec, half_width, n) = match key {
        (1, 3, PurePower) => (nominal(family), 100.0, 8192),
        (1, 3, DoublePower) => (NonlinearitySpec::double_power(2.5, 3.0), 100.0, 8192),
        (1, 3, Rational) => (NonlinearitySpec::rational_example(3.1, 3.3), 100.0, 8192),
        (1, 5, DoublePower) => (nominal(family), 50.0, 8192),
        (1, 5, _) => (nominal(family), 100.0, 8192),
        (1, 7, _) => (nominal(family), 100.0, 4096),
        (2, 3, PurePower) => (NonlinearitySpec::pure_power(2.2), 100.0, 320),
        (2, 3, DoublePower) => (NonlinearitySpec::double_power(2.2, 2.3), 80.0, 320),
        (2, 3, Rational) => {
            return Err(SkippedPoint {
                dim,
                s,
                family,
                reason: format!("rational example needs 3 < q < r < 2*_s = {crit:.4}"),
            });
        }
        (2, 5, PurePower) => (nominal(family), 10.0, 320),
        (2, 5, DoublePower) => (NonlinearitySpec::double_power(2.5, 3.0), 20.0, 384),
        (2, 5, Rational) => (NonlinearitySpec::rational_example(3.25, 3.5), 10.0, 384),
        (2, 7, PurePower) => (nominal(family), 20.0, 256),
        (2, 7, DoublePower) => (NonlinearitySpec::double_power(3.0, 3.5), 20.0, 256),
        (2, 7, Rational) => (NonlinearitySpec::rational_example(3.25, 3.5), 20.0, 256),
        _ => {
            return Err(SkippedPoint { dim, s, family, reason: "not part of the sweep".into() });
        }
    };
    let adapted = if spec == nominal(family) {
        None
    } else if nominal(family).r() >= crit {
        Some(format!("nominal r = {} is not below 2*_s = {crit:.4}", nominal(family).r()))
    } else {
        Some(format!(
            "nominal r = {} is admissible (2*_s = {crit:.4}) but the state concentrates below the grid scale",
            nominal(family).r()
        ))
    };
    Ok(SweepPoint { dim, s, family, spec, half_width, n, adapted })
}

/// All points of the sweep, solvable ones first.
pub fn sweep() -> (Vec<SweepPoint>, Vec<SkippedPoint>) {
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for dim in [1, 2] {
        for s in SWEEP_S {
            for family in Family::ALL {
                match sweep_point(dim, s, family) {
                    Ok(p) => ok.push(p),
                    Err(k) => skipped.push(k),
                }
            }
        }
    }
    (ok, skipped)
}
