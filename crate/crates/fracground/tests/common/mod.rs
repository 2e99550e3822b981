#![allow(dead_code)]

use fracground::ground_state::{GroundStateRecord, SolverOptions, solve_ground_state};
use fracground::{NonlinearitySpec, make_grid};
use std::sync::OnceLock;

pub fn torus() -> SolverOptions {
    SolverOptions { whole_space: false, ..SolverOptions::default() }
}

/// Benjamin-Ono soliton on `L = 200`, `n = 8192`, torus only.
pub fn bo() -> &'static GroundStateRecord {
    static REC: OnceLock<GroundStateRecord> = OnceLock::new();
    REC.get_or_init(|| {
        let g = make_grid(1, 200.0, 8192).unwrap();
        solve_ground_state(&NonlinearitySpec::pure_power(3.0), 1.0, 0.5, 1, &g, &torus()).unwrap()
    })
}

/// `u^3 + u^5` at `N = 1`, `s = 1/2`, torus only.
pub fn double() -> &'static GroundStateRecord {
    static REC: OnceLock<GroundStateRecord> = OnceLock::new();
    REC.get_or_init(|| {
        let g = make_grid(1, 50.0, 8192).unwrap();
        solve_ground_state(&NonlinearitySpec::double_power(4.0, 6.0), 1.0, 0.5, 1, &g, &torus()).unwrap()
    })
}

/// Pure cubic-type state in two dimensions, `s = 1/2`.
pub fn planar() -> &'static GroundStateRecord {
    static REC: OnceLock<GroundStateRecord> = OnceLock::new();
    REC.get_or_init(|| {
        let g = make_grid(2, 10.0, 128).unwrap();
        solve_ground_state(&NonlinearitySpec::pure_power(3.0), 1.0, 0.7, 2, &g, &torus()).unwrap()
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
