//! Sampled check of the structural hypotheses for several nonlinearities,
//! including one that fails.

use fracground::NonlinearitySpec;
use fracground::nonlinearity::{log_samples, validate_hypotheses};

fn main() {
    let ts = log_samples(1e-6, 1e6, 400);
    let cases = [
        NonlinearitySpec::pure_power(3.0),
        NonlinearitySpec::double_power(4.0, 6.0),
        NonlinearitySpec::rational_example(4.0, 6.0),
        NonlinearitySpec::pure_power(2.0),
    ];
    for spec in &cases {
        let rep = validate_hypotheses(spec, &ts, Some((1, 0.5)));
        println!("{}  (q, r) best = ({:.4}, {:.4})", spec.name(), rep.q_best, rep.r_best);
        for c in &rep.checks {
            println!("  {:<4} {:<5} {:>12.4e}  {}", c.name, c.pass, c.margin, c.detail);
        }
    }
}
