//! Spectral certification of the Benjamin-Ono soliton: Morse index, kernel,
//! sector spectra and the second radial eigenfunction.

use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::linearized::{SpectrumOptions, morse_index, spectrum_report};
use fracground::{NonlinearitySpec, make_grid};

fn main() -> fracground::Result<()> {
    let grid = make_grid(1, 200.0, 8192)?;
    let opts = SolverOptions { whole_space: false, ..SolverOptions::default() };
    let rec = solve_ground_state(&NonlinearitySpec::pure_power(3.0), 1.0, 0.5, 1, &grid, &opts)?;
    let rep = spectrum_report(&rec, &SpectrumOptions::default())?;
    let (mu, mu_rad) = morse_index(&rep);
    println!("morse index {mu}, radial {mu_rad}");
    println!("kernel dimension {} at tol_zero {:.2e}, alignment {:.6}", rep.kernel_dimension, rep.tol_zero, rep.kernel_alignment);
    println!("lowest full-grid eigenvalues {:?}", rep.full_values);
    for sec in &rep.sectors {
        let shown: Vec<String> = sec.values.iter().take(4).map(|v| format!("{v:.6}")).collect();
        println!("sector l = {} (multiplicity {}): {}", sec.l, sec.multiplicity, shown.join(", "));
    }
    if let Some(r2) = &rep.radial_second {
        println!(
            "second radial eigenvalue {:.6} (below lambda: {}), {} sign change(s), psi(0) = {:.4}",
            r2.value, r2.below_edge, r2.sign_changes, r2.psi_at_origin
        );
    }
    Ok(())
}
