//! The parameter sweep: Pohozaev residual, decay exponent and Morse data
//! at every point. Takes a few minutes.

use fracground::ground_state::{SolverOptions, solve_ground_state};
use fracground::linearized::{SpectrumOptions, morse_index, spectrum_report};
use fracground::sweep::sweep;
use std::time::Instant;

fn main() -> fracground::Result<()> {
    let (points, skipped) = sweep();
    for s in &skipped {
        println!("skipped N={} s={} {}: {}", s.dim, s.s, s.family.label(), s.reason);
    }
    for p in &points {
        let clock = Instant::now();
        let rec = solve_ground_state(&p.spec, 1.0, p.s, p.dim, &p.grid()?, &SolverOptions::default())?;
        let rep = spectrum_report(&rec, &SpectrumOptions::default())?;
        let (mu, mu_rad) = morse_index(&rep);
        println!(
            "{:<22} pohozaev {:.2e}  decay {:.3} (N+2s = {:.1})  morse ({mu},{mu_rad})  kernel {}  {:.1} s",
            p.label(),
            rec.diagnostics.pohozaev_residual,
            rec.diagnostics.decay_exponent,
            p.dim as f64 + 2.0 * p.s,
            rep.kernel_dimension,
            clock.elapsed().as_secs_f64()
        );
        if let Some(note) = &p.adapted {
            println!("    {note}");
        }
    }
    Ok(())
}
