mod common;

use common::{bo, double, planar};
use fracground::fractional::FracLaplacian;
use fracground::grid::{Field, dot, norm2};
use fracground::ground_state::axis_line;
use fracground::linearized::{
    SchrodingerOperator, SpectrumOptions, bilinear_form, lminus_check, lplus_operator, morse_index, oscillation_count,
    picone_identity_check, radial_eigenpairs, random_odd_field, second_eigfn_identity_check, spectrum_report,
    symmetric_spectrum,
};
use fracground::spectral::Spectral;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn bo_report() -> &'static fracground::linearized::SpectrumReport {
    static R: OnceLock<fracground::linearized::SpectrumReport> = OnceLock::new();
    R.get_or_init(|| spectrum_report(bo(), &SpectrumOptions::default()).unwrap())
}

fn planar_report() -> &'static fracground::linearized::SpectrumReport {
    static R: OnceLock<fracground::linearized::SpectrumReport> = OnceLock::new();
    R.get_or_init(|| spectrum_report(planar(), &SpectrumOptions::default()).unwrap())
}

fn derivative(f: &Field) -> Field {
    Field::new(f.grid, Spectral::new(f.grid).derivative(&f.values, 0)).unwrap()
}

#[test]
fn lplus_on_state_is_f_minus_fprime_u() {
    for rec in [bo(), double()] {
        let lp = lplus_operator(rec).unwrap();
        let u = &rec.field.values;
        let got = lp.apply(u);
        let want: Vec<f64> = u.iter().map(|&x| rec.spec.f(x) - rec.spec.fprime(x) * x).collect();
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(common::max_abs_diff(&got, &want) < 1e-8 * scale);
    }
}

#[test]
fn translation_mode_in_kernel() {
    for rec in [bo(), double(), planar()] {
        let du = derivative(&rec.field);
        let r = lplus_operator(rec).unwrap().apply(&du.values);
        assert!(norm2(&r) < 1e-6 * norm2(&du.values), "|L+ u'| / |u'| = {}", norm2(&r) / norm2(&du.values));
    }
}

#[test]
fn potential_radial_non_decreasing() {
    for rec in [bo(), double()] {
        let line = axis_line(&rec.field);
        let c = rec.field.grid.n / 2;
        let v: Vec<f64> = line[c..].iter().map(|&u| rec.lambda - rec.spec.fprime(u)).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}

#[test]
fn sector_one_bottom_is_translation() {
    for rep in [bo_report(), planar_report()] {
        let l1 = rep.sectors.iter().find(|s| s.l == 1).unwrap();
        assert!(l1.values[0].abs() <= rep.sector_tol);
        assert!(rep.sector1_alignment > 0.999);
        let l0 = rep.sectors.iter().find(|s| s.l == 0).unwrap();
        assert!(l0.values[0] < 0.0);
    }
}

#[test]
fn sector_two_above_sector_one() {
    let m = planar_report().l2_margin.unwrap();
    assert!(m > 0.0, "margin {m}");
    assert!(bo_report().l2_margin.is_none());
}

#[test]
fn morse_index_of_ground_states() {
    assert_eq!(morse_index(bo_report()), (1, 1));
    assert_eq!(morse_index(planar_report()), (1, 1));
    assert_eq!(bo_report().kernel_dimension, 1);
    assert_eq!(planar_report().kernel_dimension, 2);
    assert!(planar_report().kernel_alignment > 0.999);
}

#[test]
fn positive_operator_has_no_negative_directions() {
    let rec = bo();
    let op = SchrodingerOperator {
        op: FracLaplacian::new(rec.field.grid, 0.5).unwrap(),
        lambda: 1.0,
        potential: vec![0.0; rec.field.grid.len()],
    };
    let res = symmetric_spectrum(&op, &rec.field.values, 2, &SpectrumOptions::default()).unwrap();
    assert!(res.values.iter().all(|v| *v > 0.9));
}

#[test]
fn form_on_state_is_negative() {
    for rec in [bo(), double()] {
        let b = bilinear_form(rec, &rec.field, &rec.field).unwrap();
        let w = rec.field.grid.weight();
        let want: f64 = w * rec.field.values.iter().map(|&u| rec.spec.f(u) * u - rec.spec.fprime(u) * u * u).sum::<f64>();
        assert!(b < 0.0);
        assert!((b - want).abs() < 1e-8 * want.abs());
    }
}

#[test]
fn form_vanishes_on_translation() {
    let rec = bo();
    let du = derivative(&rec.field);
    let b = bilinear_form(rec, &du, &du).unwrap();
    assert!(b.abs() < 1e-8 * du.dot(&du), "{b}");
}

#[test]
fn rayleigh_quotients_above_bottom() {
    let rec = bo();
    let mu1 = bo_report().full_values[0];
    let g = rec.field.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let c = rng.gen_range(-5.0..5.0);
        let w = rng.gen_range(0.3..4.0);
        let a = rng.gen_range(-1.0..1.0);
        let phi = Field::from_fn(g, |x| (-((x[0] - c) / w).powi(2)).exp() + a * (-(x[0] / 2.0).powi(2)).exp());
        let q = bilinear_form(rec, &phi, &phi).unwrap() / phi.dot(&phi);
        assert!(q >= mu1 - 1e-8, "{q} < {mu1}");
    }
}

#[test]
fn oscillation_counts() {
    let r: Vec<f64> = (0..800).map(|j| (j as f64 + 0.5) / 800.0 * 7.0).collect();
    let v: Vec<f64> = r.iter().map(|x| (5.0 * std::f64::consts::PI * x / 7.0).cos()).collect();
    assert_eq!(oscillation_count(&v).unwrap(), 5);
    let (_, phi1, _, _) = radial_eigenpairs(bo(), &SpectrumOptions::default()).unwrap();
    assert_eq!(oscillation_count(&axis_line(&phi1)).unwrap(), 0);
}

#[test]
fn second_radial_eigenfunction_has_one_node() {
    let r2 = bo_report().radial_second.as_ref().unwrap();
    assert!(r2.below_edge);
    assert_eq!(r2.sign_changes, 1);
    assert!(r2.psi_at_origin < 0.0);
}

#[test]
fn half_identities_of_eigenfunctions() {
    let rec = bo();
    let (mu1, phi1, mu2, phi2) = radial_eigenpairs(rec, &SpectrumOptions::default()).unwrap();
    let c = second_eigfn_identity_check(rec, &phi2, mu2).unwrap();
    assert!(c.res_plus < 1e-6 && c.res_minus < 1e-6, "{c:?}");
    let c1 = second_eigfn_identity_check(rec, &phi1, mu1).unwrap();
    assert!(c1.one_signed);
    assert_eq!(c1.res_minus, 0.0);
    let other = random_odd_field(rec, 4).map(|v| v + 0.2 * v.abs());
    let c3 = second_eigfn_identity_check(rec, &other, mu2).unwrap();
    assert!(c3.res_plus.max(c3.res_minus) > 1e-2);
}

#[test]
fn lminus_ground_state() {
    for rec in [bo(), double()] {
        let r = lminus_check(rec, &SpectrumOptions::default()).unwrap();
        assert!(r.residual < 1e-8 && r.lowest.abs() < 1e-8 && r.gap > 0.0 && r.positive, "{r:?}");
    }
}

#[test]
fn lminus_of_perturbed_state() {
    let mut rec = bo().clone();
    let g = rec.field.grid;
    let peak = rec.field.max();
    let bump = Field::from_fn(g, |x| peak * (-(x[0] - 0.5).powi(2)).exp());
    rec.field = Field::new(g, rec.field.values.iter().zip(&bump.values).map(|(u, b)| u + 0.1 * b).collect()).unwrap();
    let r = lminus_check(&rec, &SpectrumOptions::default()).unwrap();
    assert!(r.residual > 1e-2 && r.residual < 1.0, "{}", r.residual);
}

#[test]
fn picone_on_random_odd_fields() {
    let rec = bo();
    for seed in 0..4 {
        let w = random_odd_field(rec, seed);
        let p = picone_identity_check(rec, &w).unwrap();
        assert!(p.relative_gap < 1e-3 && p.min_h >= -1e-9, "{p:?}");
    }
}

#[test]
fn picone_on_truncated_translation_mode() {
    let rec = bo();
    let g = rec.field.grid;
    let du = derivative(&rec.field);
    let mut last = f64::INFINITY;
    for radius in [4.0, 16.0, 64.0] {
        let w = Field::new(
            g,
            (0..g.n).map(|i| du.values[i] * (-(g.coord(i) / radius).powi(4)).exp()).collect(),
        )
        .unwrap();
        let p = picone_identity_check(rec, &w).unwrap();
        let norm = w.dot(&w);
        assert!(p.lhs >= -1e-10 * norm && p.rhs >= -1e-10 * norm);
        let q = p.lhs / norm;
        assert!(q < last);
        last = q;
        assert!((p.lhs - p.rhs).abs() < 1e-3 * norm);
    }
    assert!(last < 1e-3);
}

#[test]
fn picone_rejects_even_field() {
    let rec = bo();
    assert!(picone_identity_check(rec, &rec.field).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lplus_form_symmetric(seed_a in 0u64..1000, seed_b in 0u64..1000) {
        let rec = bo();
        let a = random_odd_field(rec, seed_a);
        let b = random_odd_field(rec, seed_b + 1000);
        let lp = lplus_operator(rec).unwrap();
        let x = lp.form(&a.values, &b.values);
        let y = lp.form(&b.values, &a.values);
        let w = rec.field.grid.weight();
        prop_assert!((x - w * dot(&lp.apply(&a.values), &b.values)).abs() < 1e-10 * (1.0 + x.abs()));
        prop_assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
    }

    #[test]
    fn random_odd_fields_are_odd(seed in 0u64..10_000) {
        let rec = bo();
        let w = random_odd_field(rec, seed);
        let n = w.grid.n;
        let c = n / 2;
        let peak = w.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 1..c {
            prop_assert!((w.values[c + i] + w.values[c - i]).abs() <= 1e-12 * peak);
        }
    }
}
