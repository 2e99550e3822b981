//! Special functions not covered by `statrs`.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta `sum_{k>=0} (a+k)^{-p}` by Euler-Maclaurin summation; valid
/// as an analytic continuation for every real `p != 1` and `a > 0`.
pub fn hurwitz_zeta(p: f64, a: f64) -> f64 {
    assert!(a > 0.0 && p != 1.0);
    let big_k = 16usize;
    let mut sum = 0.0;
    for k in 0..big_k {
        sum += (a + k as f64).powf(-p);
    }
    let x = a + big_k as f64;
    sum += x.powf(1.0 - p) / (p - 1.0) + 0.5 * x.powf(-p);
    // rising factorial p (p+1) .. (p+2j-2)
    let mut rising = p;
    let mut xpow = x.powf(-p - 1.0);
    for (j, b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += b * rising * xpow;
        let m = 2 * j as u32 + 1;
        rising *= (p + m as f64) * (p + m as f64 + 1.0);
        xpow /= x * x;
    }
    sum
}

/// Riemann zeta for real `p != 1`.
pub fn riemann_zeta(p: f64) -> f64 {
    hurwitz_zeta(p, 1.0)
}

/// Modified Bessel function `K_0(x)` for `x > 0`.
pub fn bessel_k0(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 2.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut i0 = 1.0;
        let mut harmonic = 0.0;
        let mut series = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            term *= q / (kf * kf);
            harmonic += 1.0 / kf;
            i0 += term;
            series += term * harmonic;
            if term < 1e-18 * i0 {
                break;
            }
        }
        -((0.5 * x).ln() + EULER_GAMMA) * i0 + series
    } else if x > 740.0 {
        0.0
    } else {
        // trapezoid on K0(x) = int_0^inf exp(-x cosh t) dt; the integrand is
        // analytic in a strip so the rule converges geometrically
        let h: f64 = 0.2;
        let mut sum = 0.5 * (-x).exp();
        let mut t = h;
        loop {
            let v = (-x * t.cosh()).exp();
            sum += v;
            if v <= 1e-18 * sum || v == 0.0 {
                break;
            }
            t += h;
        }
        sum * h
    }
}

/// `1 / Gamma(-sigma)`, zero at non-negative integers `sigma`.
pub fn recip_gamma_neg(sigma: f64) -> f64 {
    // Gamma(-x) Gamma(1+x) = -pi / sin(pi x)
    -(PI * sigma).sin() * statrs::function::gamma::gamma(1.0 + sigma) / PI
}

/// Brent's method on a bracketing interval.
pub fn brent(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1 * xm.signum() };
        fb = f(b);
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((riemann_zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(0.0) + 0.5).abs() < 1e-14);
        assert!((riemann_zeta(-1.0) + 1.0 / 12.0).abs() < 1e-14);
        // zeta(-1/2) = -0.2078862249773545...
        assert!((riemann_zeta(-0.5) + 0.207_886_224_977_354_6).abs() < 1e-13);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let p = 3.3;
        assert!((hurwitz_zeta(p, 0.5) - (2f64.powf(p) - 1.0) * riemann_zeta(p)).abs() < 1e-13);
    }

    #[test]
    fn k0_values() {
        // reference values of K_0
        let cases = [
            (0.01, 4.721_244_730_161_095),
            (0.5, 0.924_419_071_227_665_9),
            (1.0, 0.421_024_438_240_708_3),
            (2.0, 0.113_893_872_749_533_4),
            (3.0, 0.034_739_504_386_279_4),
            (10.0, 1.778_006_231_616_765e-5),
        ];
        for (x, v) in cases {
            assert!((bessel_k0(x) - v).abs() < 1e-13 * v.max(1.0), "{x} {} {v}", bessel_k0(x));
        }
    }

    #[test]
    fn brent_finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }
}
