//! Apply `(-Delta)^{1/2}` to `1/(1+x^2)` on a large periodic box and compare
//! with the closed form `(1 - x^2)/(1 + x^2)^2`; then check the spectral
//! symbol against the singular-integral form for a Gaussian.

use fracground::fractional::{frac_laplacian_apply, singular_integral_apply};
use fracground::{Field, make_grid};

fn main() -> fracground::Result<()> {
    let grid = make_grid(1, 400.0, 16384)?;
    let u = Field::from_fn(grid, |x| 1.0 / (1.0 + x[0] * x[0]));
    let lu = frac_laplacian_apply(&u, 0.5)?;
    let mut worst: f64 = 0.0;
    for i in 0..grid.n {
        let x = grid.coord(i);
        if x.abs() <= 10.0 {
            let exact = (1.0 - x * x) / (1.0 + x * x).powi(2);
            worst = worst.max((lu.values[i] - exact).abs());
        }
    }
    println!("|D| (1+x^2)^-1, max error on |x| <= 10: {worst:.3e}");

    let g = make_grid(1, 20.0, 1024)?;
    let gauss = Field::from_fn(g, |x| (-x[0] * x[0]).exp());
    for s in [0.3, 0.5, 0.7] {
        let a = frac_laplacian_apply(&gauss, s)?;
        let b = singular_integral_apply(&gauss, s, 2.0 * g.spacing())?;
        let d = a.values.iter().zip(&b.values).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        println!("s = {s}: symbol vs singular integral, max difference {d:.3e}");
    }
    Ok(())
}
