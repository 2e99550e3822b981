//! Solve the Benjamin-Ono soliton equation `|D| u + u = u^2` and compare with
//! the closed form `Q(x) = 2 / (1 + x^2)`.

use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::{NonlinearitySpec, make_grid};
use std::time::Instant;

fn main() -> fracground::Result<()> {
    let grid = make_grid(1, 200.0, 8192)?;
    let spec = NonlinearitySpec::pure_power(3.0);
    let clock = Instant::now();
    let rec = solve_ground_state(&spec, 1.0, 0.5, 1, &grid, &SolverOptions::default())?;
    let elapsed = clock.elapsed().as_secs_f64();
    let error = |values: &[f64]| {
        let mut worst: f64 = 0.0;
        for (i, u) in values.iter().enumerate() {
            let x = grid.coord(i);
            if x.abs() <= 10.0 {
                let q = 2.0 / (1.0 + x * x);
                worst = worst.max((u - q).abs() / q);
            }
        }
        worst
    };
    let free = rec.whole_space.as_ref().expect("whole-space state");
    println!("residual        {:.3e}", rec.residual_norm);
    println!("max rel error   {:.3e} (whole space), {:.3e} (torus) on |x| <= 10",
        error(&free.field.values), error(&rec.field.values));
    println!("pohozaev        {:.3e}", rec.diagnostics.pohozaev_residual);
    println!("pohozaev torus  {:.3e}", rec.diagnostics.pohozaev_torus);
    println!("decay exponent  {:.4}", rec.diagnostics.decay_exponent);
    println!("descent/newton  {} / {}", rec.descent_iterations, rec.newton_iterations);
    println!("nehari t*       {:.12}", rec.diagnostics.nehari_t);
    println!("energy identity {:.3e}", rec.diagnostics.energy_identity);
    println!("elapsed         {elapsed:.2} s");
    Ok(())
}
