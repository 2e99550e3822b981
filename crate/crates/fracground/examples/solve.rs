//! Ground state of `(-Delta)^s u + u = u^3 + u^5` in two dimensions with its
//! diagnostics.

use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::sweep::{Family, sweep_point};
use std::time::Instant;

fn main() -> fracground::Result<()> {
    let point = sweep_point(2, 0.7, Family::DoublePower).expect("sweep point");
    let grid = point.grid()?;
    let clock = Instant::now();
    let rec = solve_ground_state(&point.spec, 1.0, point.s, 2, &grid, &SolverOptions::default())?;
    let d = &rec.diagnostics;
    println!("{} on [-{}, {})^2, n = {}", point.spec.name(), grid.half_width, grid.half_width, grid.n);
    println!("peak            {:.10}", rec.field.max());
    println!("residual        {:.3e}", rec.residual_norm);
    println!("energy          {:.10}", rec.energy);
    println!("pohozaev        {:.3e} (torus {:.3e})", d.pohozaev_residual, d.pohozaev_torus);
    println!("decay exponent  {:.4} (N + 2s = {})", d.decay_exponent, 2.0 + 2.0 * point.s);
    println!("asymmetry       {:.3e}", d.asymmetry);
    println!("monotone        {}", d.monotone);
    println!("iterations      {} descent, {} newton", rec.descent_iterations, rec.newton_iterations);
    println!("elapsed         {:.1} s", clock.elapsed().as_secs_f64());
    Ok(())
}
