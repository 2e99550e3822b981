//! Picone identity `<L+ w, w> = int int H` for random odd fields in one
//! dimension, with the pointwise sign of `H`.

use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::linearized::{picone_identity_check, random_odd_field};
use fracground::sweep::{Family, sweep_point};

fn main() -> fracground::Result<()> {
    let opts = SolverOptions { whole_space: false, ..SolverOptions::default() };
    for s in [0.3, 0.5, 0.7] {
        let point = sweep_point(1, s, Family::PurePower).expect("sweep point");
        let rec = solve_ground_state(&point.spec, 1.0, s, 1, &point.grid()?, &opts)?;
        println!("{} (L = {}, n = {})", point.label(), point.half_width, point.n);
        for seed in 0..5 {
            let w = random_odd_field(&rec, seed);
            let c = picone_identity_check(&rec, &w)?;
            println!("  seed {seed}: lhs {:.8e} rhs {:.8e} relative gap {:.2e} min H {:.2e}", c.lhs, c.rhs, c.relative_gap, c.min_h);
        }
    }
    Ok(())
}
