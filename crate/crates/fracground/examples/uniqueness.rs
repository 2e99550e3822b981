//! Random starts without symmetry converge, after recentring, to one profile.

use fracground::ground_state::{SolverOptions, uniqueness_probe};
use fracground::sweep::{Family, sweep_point};

fn main() -> fracground::Result<()> {
    let opts = SolverOptions { whole_space: false, ..SolverOptions::default() };
    let seeds: Vec<u64> = (1..=8).collect();
    for family in Family::ALL {
        let Ok(point) = sweep_point(1, 0.5, family) else { continue };
        let rep = uniqueness_probe(&point.spec, 1.0, point.s, &point.grid()?, &seeds, &opts)?;
        let asym = rep.descent_asymmetry.iter().cloned().fold(0.0, f64::max);
        println!("{}: max spread {:.2e}, largest descent asymmetry {asym:.2e}", point.label(), rep.max_spread);
    }
    Ok(())
}
