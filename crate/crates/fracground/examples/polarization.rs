//! Polarization of the second radial eigenfunction of `L+` about planes
//! `x_1 = a`, `0 < a < rho`, with `rho` its sign-change radius.

use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::linearized::{SpectrumOptions, radial_eigenpairs};
use fracground::polarization::{default_offsets, polarization_report, sign_change_radius, star_values};
use fracground::sweep::{Family, sweep_point};

fn main() -> fracground::Result<()> {
    for (dim, s) in [(1, 0.5), (2, 0.5)] {
        let point = sweep_point(dim, s, Family::PurePower).expect("sweep point");
        let opts = SolverOptions { whole_space: false, ..SolverOptions::default() };
        let rec = solve_ground_state(&point.spec, 1.0, s, dim, &point.grid()?, &opts)?;
        let (_, _, mu2, phi2) = radial_eigenpairs(&rec, &SpectrumOptions::default())?;
        let rho = sign_change_radius(&phi2)?;
        println!("N = {dim}, s = {s}: mu_2 = {mu2:.6}, rho = {rho:.4}");
        for a in default_offsets(&phi2.grid, rho) {
            let r = polarization_report(&rec, &phi2, a, 0)?;
            let (plus, minus) = star_values(&phi2, a)?;
            println!(
                "  a = {a:.4}: norms {:.1e}/{:.1e}, seminorm drop {:.3e}/{:.3e}, min relative gap {:.2e}, w_a(+-x*) = {plus:.2e}, {minus:.2e}",
                r.norm_preservation.0, r.norm_preservation.1, r.seminorm_drop.0, r.seminorm_drop.1, r.min_relative_gap
            );
        }
    }
    Ok(())
}
