//! The rescaled branch `v_mu` for `u^3 + u^5` over `mu` in `[1, 1000]`, its
//! monitors, and the approach to the pure-power limit.

use fracground::continuation::{BranchOptions, Parameterization, extend_branch, limit_compare, mu_branch_monitors, mu_start};
use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::{NonlinearitySpec, make_grid};

fn main() -> fracground::Result<()> {
    let s = 0.5;
    let grid = make_grid(1, 50.0, 8192)?;
    let spec = NonlinearitySpec::double_power(4.0, 6.0);
    let opts = BranchOptions {
        parameterization: Parameterization::Mu,
        checkpoints: vec![10.0, 100.0, 1000.0],
        ..BranchOptions::default()
    };
    let v0 = mu_start(&spec, 1.0, s, &grid, 1e-10)?;
    let branch = extend_branch(&v0, &spec, 1.0, 1000.0, &opts)?;
    let mon = mu_branch_monitors(&branch, &spec, 0.01, 1e-13)?;
    println!("{} points; B > 0: {}, B' > 0: {}", branch.points.len(), mon.b_positive, mon.b_prime_positive);
    for m in mon.points.iter().filter(|m| m.b_prime_fd.is_some()) {
        println!(
            "  mu {:>6.0}: B {:.6e}  B' {:.6e}  fd error {:.2e}  mass identity {:.1e}",
            m.mu,
            m.b,
            m.b_prime,
            m.b_prime_error.unwrap_or(f64::NAN),
            m.mass_identity
        );
    }
    let torus = SolverOptions { whole_space: false, ..SolverOptions::default() };
    let v_star = solve_ground_state(&spec.limit_pure_power(), 1.0, s, 1, &grid, &torus)?;
    let table = limit_compare(&branch, &v_star, 1e-8)?;
    for row in &table.rows {
        println!("  mu {:>6.0}: |v_mu - v_*|_2 = {:.3e}, H^s = {:.3e}", row.mu, row.l2, row.hs);
    }
    println!("decreasing: {}", table.monotone);
    Ok(())
}
