//! Jacobi θ₁ evaluation engine behind ℘, ζ and σ.
//!
//! The lattice is stored through a Gauss-reduced period basis `(2w, 2w')`
//! with `τ = w'/w` in the standard fundamental domain, so `|q| ≤ e^{−π√3/2}`
//! and a handful of series terms reach full double precision.

use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Values of the Weierstrass functions at one (reduced) point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LocalValues {
    pub wp: Complex64,
    pub wp_prime: Complex64,
    pub zeta: Complex64,
    pub ln_sigma: Complex64,
}

#[derive(Debug, Clone)]
pub(crate) struct ThetaEngine {
    /// Half of the first reduced period.
    pub w: Complex64,
    /// Half of the second reduced period.
    pub w2: Complex64,
    pub tau: Complex64,
    /// `2(−1)ⁿ q^{(n+½)²}` for the retained terms.
    coeffs: Vec<Complex64>,
    ln_prefactor: Complex64,
    /// ζ(w) and ζ(w').
    pub eta_w: Complex64,
    pub eta_w2: Complex64,
}

/// Gauss–Lagrange reduction of a period pair, oriented so Im(p2/p1) > 0.
pub(crate) fn reduce_basis(mut p1: Complex64, mut p2: Complex64) -> (Complex64, Complex64) {
    for _ in 0..64 {
        let m = (p2 / p1).re.round();
        p2 -= p1 * m;
        if p2.norm() < p1.norm() * (1.0 - 1e-14) {
            std::mem::swap(&mut p1, &mut p2);
        } else {
            break;
        }
    }
    if (p2 / p1).im < 0.0 {
        p2 = -p2;
    }
    (p1, p2)
}

impl ThetaEngine {
    pub fn new(period1: Complex64, period2: Complex64) -> Self {
        let (p1, p2) = reduce_basis(period1, period2);
        let w = p1 / 2.0;
        let w2 = p2 / 2.0;
        let tau = w2 / w;

        // |terms| ≤ |q|^{(n+½)²} e^{(2n+1)π Im τ}; stop far below machine epsilon.
        let im_tau = tau.im;
        let mut coeffs = Vec::new();
        for n in 0..64usize {
            let k = n as f64 + 0.5;
            let log_bound = -PI * im_tau * (k * k - 2.0 * k);
            let c = (I * PI * tau * (k * k)).exp() * (2.0 * if n % 2 == 0 { 1.0 } else { -1.0 });
            coeffs.push(c);
            if n >= 2 && log_bound < -45.0 {
                break;
            }
        }

        let theta1p0: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * (2 * n + 1) as f64)
            .sum();
        let theta1ppp0: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| -c * ((2 * n + 1) as f64).powi(3))
            .sum();
        let eta_w = -(PI * PI) * theta1ppp0 / (12.0 * w * theta1p0);
        let ln_prefactor = (2.0 * w / PI).ln() - theta1p0.ln();

        let mut engine = ThetaEngine {
            w,
            w2,
            tau,
            coeffs,
            ln_prefactor,
            eta_w,
            eta_w2: Complex64::new(0.0, 0.0),
        };
        engine.eta_w2 = engine.local(w2).zeta;
        engine
    }

    /// θ₁ and its first three derivatives at `v`.
    fn theta1(&self, v: Complex64) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (n, c) in self.coeffs.iter().enumerate() {
            let k = (2 * n + 1) as f64;
            let arg = v * k;
            let (s, co) = (arg.sin(), arg.cos());
            out[0] += c * s;
            out[1] += c * co * k;
            out[2] -= c * s * (k * k);
            out[3] -= c * co * (k * k * k);
        }
        out
    }

    /// Evaluate at a point that is already reduced towards the origin.
    pub fn local(&self, z: Complex64) -> LocalValues {
        let scale = PI / (2.0 * self.w);
        let v = z * scale;
        let [t0, t1, t2, t3] = self.theta1(v);
        let l1 = t1 / t0;
        let l2 = t2 / t0 - l1 * l1;
        let l3 = t3 / t0 - 3.0 * (t2 / t0) * l1 + 2.0 * l1 * l1 * l1;
        let eta_over_w = self.eta_w / self.w;
        LocalValues {
            zeta: eta_over_w * z + scale * l1,
            wp: -eta_over_w - scale * scale * l2,
            wp_prime: -scale * scale * scale * l3,
            ln_sigma: self.ln_prefactor + eta_over_w * z * z / 2.0 + t0.ln(),
        }
    }

    /// Split `z = z_r + 2a·w + 2b·w'` with `z_r` the representative closest
    /// to the origin.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let t = z / (2.0 * self.w);
        let beta = t.im / self.tau.im;
        let alpha = t.re - beta * self.tau.re;
        let a0 = alpha.round() as i64;
        let b0 = beta.round() as i64;
        let mut best = (z, 0, 0, f64::INFINITY);
        for da in -1..=1 {
            for db in -1..=1 {
                let (a, b) = (a0 + da, b0 + db);
                let zr = z - 2.0 * self.w * a as f64 - 2.0 * self.w2 * b as f64;
                let d = zr.norm();
                if d < best.3 - 1e-15 * (1.0 + d) {
                    best = (zr, a, b, d);
                }
            }
        }
        (best.0, best.1, best.2)
    }

    pub fn lattice_vector(&self, a: i64, b: i64) -> Complex64 {
        2.0 * self.w * a as f64 + 2.0 * self.w2 * b as f64
    }

    pub fn quasi_period(&self, a: i64, b: i64) -> Complex64 {
        2.0 * self.eta_w * a as f64 + 2.0 * self.eta_w2 * b as f64
    }
}
