//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Adaptive Simpson quadrature on [a, b].
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// ∫_{e}^{∞} dt / √(4t³ − g₂t − g₃) for a real root `e` of the cubic with
/// P₃ > 0 on (e, ∞). Substitutions t = e + u², u = tan θ remove both the
/// endpoint singularity and the infinite range.
pub fn real_half_period_by_quadrature(g2: f64, g3: f64, e: f64) -> f64 {
    let _ = g3;
    let f = |theta: f64| {
        if theta >= std::f64::consts::FRAC_PI_2 {
            return 1.0;
        }
        let u = theta.tan();
        let s = u * u;
        let q = 4.0 * s * s + 12.0 * e * s + 12.0 * e * e - g2;
        let sec2 = 1.0 + s;
        2.0 * sec2 / q.sqrt()
    };
    simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, 1e-14)
}

/// ∫_{−∞}^{e} dt / √(−(4t³ − g₂t − g₃)) for the smallest real root `e`.
pub fn imaginary_half_period_by_quadrature(g2: f64, e: f64) -> f64 {
    // t = e − u²: −P₃(e − s) = s·(−4s² + 12 e s − 12e² + g₂)·(−1)·(−1)
    let f = |theta: f64| {
        if theta >= std::f64::consts::FRAC_PI_2 {
            return 1.0;
        }
        let u = theta.tan();
        let s = u * u;
        let q = 4.0 * s * s - 12.0 * e * s + 12.0 * e * e - g2;
        2.0 * (1.0 + s) / q.sqrt()
    };
    simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, 1e-14)
}

/// Real roots of a polynomial by dense sign-change scan plus bisection.
pub fn scan_real_roots(coeffs: &[f64], lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let p = |x: f64| coeffs.iter().fold(0.0, |acc, &c| acc * x + c);
    let mut out = Vec::new();
    let h = (hi - lo) / samples as f64;
    for i in 0..samples {
        let (mut a, mut b) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
        let (mut fa, fb) = (p(a), p(b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let fm = p(m);
            if fa * fm <= 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const TEST_LATTICES: [(f64, f64); 4] = [(4.0, 0.0), (0.0, -4.0), (1.0, 1.0), (5.0, 1.0)];
