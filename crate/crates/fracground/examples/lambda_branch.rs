//! Continuation in `lambda` over `[1, 100]`: double power monitors and the
//! derivative identity `g'(lambda) = int u^2`, then the exact covariance of
//! the pure-power branch.

use fracground::continuation::{BranchOptions, Direction, extend_branch, g_derivative_check, t_lambda};
use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::{NonlinearitySpec, make_grid};

fn main() -> fracground::Result<()> {
    let s = 0.5;
    let opts = SolverOptions { whole_space: false, ..SolverOptions::default() };
    let spec = NonlinearitySpec::double_power(4.0, 6.0);
    let start = solve_ground_state(&spec, 1.0, s, 1, &make_grid(1, 50.0, 8192)?, &opts)?;
    let branch = extend_branch(&start, &spec, 1.0, 100.0, &BranchOptions::default())?;
    println!("{} points, {} steps, ratio band {:.4}", branch.points.len(), branch.steps.len(), branch.band);
    for p in branch.checkpoints() {
        let d = g_derivative_check(p, 1e-3, 1e-12)?;
        println!(
            "  lambda {:>6.1}  g {:.8e}  V/lM {:.4}  T/lM {:.4}  g' error {:.2e}",
            p.lambda, p.monitors.g, p.monitors.ratio_potential, p.monitors.ratio_kinetic, d.relative_error
        );
    }
    let monotone = branch.points.windows(2).all(|w| w[1].monitors.g >= w[0].monitors.g);
    println!("g non-decreasing: {monotone}");

    let pure = NonlinearitySpec::pure_power(3.0);
    let base = solve_ground_state(&pure, 1.0, s, 1, &make_grid(1, 100.0, 8192)?, &opts)?;
    let pb = extend_branch(&base, &pure, 1.0, 100.0, &BranchOptions::default())?;
    let peak = base.field.max();
    for p in pb.checkpoints() {
        let back = t_lambda(&p.record.field, p.lambda, s, 3.0, Direction::Forward)?;
        let err = back.values.iter().zip(&base.field.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
        println!("  pure power, lambda {:>6.1}: |T_lambda u_lambda - u_1| / |u_1| = {err:.2e}", p.lambda);
    }
    Ok(())
}
