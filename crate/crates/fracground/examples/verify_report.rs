//! Run the certification suite from a config written in code and emit the
//! report files into a temporary directory.

use fracground::sweep::{Family, sweep_point};
use fracground::report::{
    DiscretizationBlock, Format, OutputBlock, ProblemBlock, RunConfig, SCHEMA_VERSION, SolverBlock, atomic_write,
    to_json, verify,
};

fn main() -> fracground::Result<()> {
    let dir = std::env::temp_dir().join("fracground-verify");
    let point = sweep_point(1, 0.3, Family::Rational).expect("sweep point");
    let cfg = RunConfig {
        schema_version: SCHEMA_VERSION,
        problem: ProblemBlock {
            dim: 1,
            s: point.s,
            lambda: 1.0,
            lambda_range: None,
            mu_range: None,
            nonlinearity: point.spec.clone(),
        },
        discretization: DiscretizationBlock { half_width: point.half_width, n: point.n, radius: None, m: 1000, l_max: 4 },
        solver: SolverBlock { trials: 4, ..SolverBlock::default() },
        output: OutputBlock { directory: dir.clone(), formats: vec![Format::Json] },
    };
    cfg.validate()?;
    let rep = verify(&cfg)?;
    atomic_write(&dir.join("verify.json"), to_json(&rep)?.as_bytes())?;
    println!("pass: {}", rep.pass);
    for f in &rep.failures {
        println!("  failed {}: {} (want {})", f.check, f.value, f.bound);
    }
    for s in &rep.skipped {
        println!("  skipped {s}");
    }
    println!("report written to {}", dir.join("verify.json").display());
    Ok(())
}
