mod common;

use common::{bo, double, max_abs_diff, torus};
use fracground::continuation::{
    BranchOptions, Direction, Parameterization, extend_branch, g_derivative_check, gns_ratio, limit_compare,
    mu_branch_monitors, mu_start, predictor, rescaled_residual, scaled_grid, t_lambda, tangent,
};
use fracground::fractional::FracLaplacian;
use fracground::grid::{Field, dot, norm2};
use fracground::ground_state::solve_ground_state;
use fracground::{NonlinearitySpec, make_grid};
use proptest::prelude::*;

fn relative(a: &[f64], b: &[f64]) -> f64 {
    max_abs_diff(a, b) / b.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[test]
fn tangent_matches_central_difference() {
    let rec = bo();
    let g = rec.field.grid;
    let du = tangent(rec, 1e-12).unwrap();
    let dl = 1e-3;
    let opts = fracground::ground_state::SolverOptions { tol: 1e-13, ..torus() };
    let hi = solve_ground_state(&rec.spec, 1.0 + dl, 0.5, 1, &g, &opts).unwrap();
    let lo = solve_ground_state(&rec.spec, 1.0 - dl, 0.5, 1, &g, &opts).unwrap();
    let fd: Vec<f64> = hi.field.values.iter().zip(&lo.field.values).map(|(a, b)| (a - b) / (2.0 * dl)).collect();
    let err = relative(&du.values, &fd);
    assert!(err < 1e-5, "{err}");
}

#[test]
fn tangent_close_to_pure_power_scaling() {
    // u_lambda(x) = lambda^{1/(r-2)} u(lambda^{1/(2s)} x) at lambda = 1, up to
    // the fixed box not scaling with lambda
    let rec = bo();
    let g = rec.field.grid;
    let du = tangent(rec, 1e-12).unwrap();
    let d = fracground::spectral::Spectral::new(g).derivative(&rec.field.values, 0);
    let want: Vec<f64> = (0..g.n).map(|i| rec.field.values[i] / (3.0 - 2.0) + g.coord(i) * d[i] / (2.0 * 0.5)).collect();
    let err = relative(&du.values, &want);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn predictor_without_step_returns_state() {
    let rec = double();
    let p = predictor(rec, 0.0).unwrap();
    assert_eq!(p.values, rec.field.values);
    assert_eq!(p.grid, rec.field.grid);
}

#[test]
fn predictor_is_first_order() {
    // pure power: the predicted values on the scaled lattice are u scaled in amplitude
    let rec = bo();
    for dl in [0.02, 0.04] {
        let p = predictor(rec, dl).unwrap();
        let amp = (1.0 + dl).powf(1.0 / (3.0 - 2.0));
        let want: Vec<f64> = rec.field.values.iter().map(|v| amp * v).collect();
        let err = relative(&p.values, &want);
        assert!(err < 2.0 * dl * dl, "dl {dl}: {err}");
    }
}

#[test]
fn t_lambda_identity_and_mass_scaling() {
    let g = make_grid(1, 20.0, 256).unwrap();
    let u = Field::from_fn(g, |x| 1.0 / (1.0 + x[0] * x[0]));
    assert_eq!(t_lambda(&u, 1.0, 0.6, 4.0, Direction::Forward).unwrap(), u);
    let mass = |f: &Field| f.grid.weight() * dot(&f.values, &f.values);
    for (lambda, s, r) in [(2.0, 0.6, 4.0), (7.5, 0.3, 3.2), (0.4, 0.9, 5.0)] {
        let v = t_lambda(&u, lambda, s, r, Direction::Forward).unwrap();
        let want = lambda.powf(1.0 / (2.0 * s) - 2.0 / (r - 2.0)) * mass(&u);
        assert!((mass(&v) - want).abs() < 1e-12 * want);
    }
}

#[test]
fn inverse_image_solves_scaled_problem() {
    let rec = bo();
    for lambda in [3.0, 20.0] {
        let v = t_lambda(&rec.field, lambda, 0.5, 3.0, Direction::Inverse).unwrap();
        assert_eq!(v.grid, scaled_grid(&rec.field.grid, lambda, 0.5));
        let op = FracLaplacian::new(v.grid, 0.5).unwrap();
        let res: Vec<f64> =
            op.apply_shifted(&v.values, lambda).iter().zip(&v.values).map(|(a, x)| a - x * x.abs()).collect();
        let scale = lambda * norm2(&v.values);
        assert!(norm2(&res) < 1e-8 * scale, "{}", norm2(&res) / scale);
    }
}

#[test]
fn pure_power_branch_is_covariant() {
    let rec = bo();
    let opts = BranchOptions { checkpoints: vec![2.0, 4.0], ..BranchOptions::default() };
    let br = extend_branch(rec, &rec.spec, 1.0, 4.0, &opts).unwrap();
    assert_eq!(br.checkpoints().count(), 2);
    for p in br.checkpoints() {
        let back = t_lambda(&p.record.field, p.lambda, 0.5, 3.0, Direction::Forward).unwrap();
        assert!((back.grid.half_width - rec.field.grid.half_width).abs() < 1e-9);
        let err = relative(&back.values, &rec.field.values);
        assert!(err < 1e-6, "lambda {}: {err}", p.lambda);
    }
    assert!(br.steps.iter().filter(|s| s.accepted).count() >= br.points.len() - 1);
}

#[test]
fn double_power_branch_monitors() {
    let rec = double();
    let opts = BranchOptions { checkpoints: vec![2.0, 5.0], ..BranchOptions::default() };
    let br = extend_branch(rec, &rec.spec, 1.0, 5.0, &opts).unwrap();
    assert!(br.points.windows(2).all(|w| w[1].lambda > w[0].lambda && w[1].monitors.g >= w[0].monitors.g));
    for p in br.checkpoints() {
        let d = g_derivative_check(p, 1e-3, 1e-12).unwrap();
        assert!(d.relative_error < 1e-5, "{d:?}");
        // torus states without the whole-space correction
        assert!(p.monitors.pohozaev < 5e-3);
        assert!(p.monitors.min_value > 0.0 || p.monitors.min_value.abs() < 1e-8);
    }
}

#[test]
fn mu_branch_of_pure_power_is_constant() {
    let spec = NonlinearitySpec::pure_power(4.0);
    let g = make_grid(1, 50.0, 2048).unwrap();
    let v0 = mu_start(&spec, 1.0, 0.7, &g, 1e-11).unwrap();
    let opts = BranchOptions {
        parameterization: Parameterization::Mu,
        checkpoints: vec![10.0],
        ..BranchOptions::default()
    };
    let br = extend_branch(&v0, &spec, 1.0, 10.0, &opts).unwrap();
    let mon = mu_branch_monitors(&br, &spec, 0.01, 1e-13).unwrap();
    let b0 = mon.points[0].b;
    assert!(mon.points.iter().all(|m| (m.b - b0).abs() < 1e-8 * b0.abs()));
    for p in &br.points {
        assert!(relative(&p.record.field.values, &v0.field.values) < 1e-8);
    }
}

#[test]
fn mu_branch_of_double_power() {
    let spec = NonlinearitySpec::double_power(4.0, 6.0);
    let g = make_grid(1, 50.0, 8192).unwrap();
    let v0 = mu_start(&spec, 1.0, 0.5, &g, 1e-10).unwrap();
    let opts = BranchOptions {
        parameterization: Parameterization::Mu,
        checkpoints: vec![10.0, 100.0],
        ..BranchOptions::default()
    };
    let br = extend_branch(&v0, &spec, 1.0, 100.0, &opts).unwrap();
    let mon = mu_branch_monitors(&br, &spec, 0.01, 1e-13).unwrap();
    assert!(mon.b_positive && mon.b_prime_positive);
    assert!(mon.max_b_prime_error < 1e-3, "{}", mon.max_b_prime_error);
    assert!(mon.max_mass_identity < 1e-8, "{}", mon.max_mass_identity);
    for p in &br.points {
        assert!(rescaled_residual(&p.record.field, p.mu, &spec, 0.5).unwrap() < 1e-8);
    }
    let v_star = solve_ground_state(&spec.limit_pure_power(), 1.0, 0.5, 1, &g, &torus()).unwrap();
    let table = limit_compare(&br, &v_star, 1e-8).unwrap();
    assert!(table.monotone);
    assert!(table.rows[1].l2 < table.rows[0].l2);
    let self_gap = limit_compare(&br, &br.points[0].record, 1e-8).unwrap();
    assert!(self_gap.rows.iter().all(|r| r.l2 > 0.0));
}

#[test]
fn limit_distance_to_itself_vanishes() {
    let spec = NonlinearitySpec::pure_power(4.0);
    let g = make_grid(1, 50.0, 2048).unwrap();
    let v0 = mu_start(&spec, 1.0, 0.7, &g, 1e-11).unwrap();
    let opts = BranchOptions {
        parameterization: Parameterization::Mu,
        checkpoints: vec![4.0],
        ..BranchOptions::default()
    };
    let br = extend_branch(&v0, &spec, 1.0, 4.0, &opts).unwrap();
    let table = limit_compare(&br, &v0, 1e-8).unwrap();
    assert!(table.rows.iter().all(|r| r.hs < 1e-8), "{:?}", table.rows);
}

#[test]
fn gns_ratio_positive_for_gaussian() {
    let g = make_grid(1, 20.0, 512).unwrap();
    let u = Field::from_fn(g, |x| (-x[0] * x[0]).exp());
    assert!(gns_ratio(&u, 0.5, 3.0).unwrap() > 0.0);
    assert!(gns_ratio(&u, 0.3, 9.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gns_ratio_is_scale_invariant(amp in 0.1f64..10.0, width in 0.5f64..2.0, s in 0.3f64..0.9) {
        // amplitude and a dilation of the whole box leave the lattice ratio unchanged
        let g = make_grid(1, 20.0, 512).unwrap();
        let p = 3.0;
        let base = Field::from_fn(g, |x| (-x[0] * x[0]).exp());
        let u = Field::new(g.scaled(width), base.values.iter().map(|v| amp * v).collect()).unwrap();
        let a = gns_ratio(&base, s, p).unwrap();
        let b = gns_ratio(&u, s, p).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * a, "{} vs {}", a, b);
    }
}
