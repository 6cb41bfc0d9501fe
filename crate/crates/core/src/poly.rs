//! Small real-coefficient polynomial toolkit: evaluation, a simultaneous
//! (Aberth–Ehrlich) root finder, Newton polishing and the closed-form roots of
//! the Weierstrass cubic `4x³ − g₂x − g₃`.

use num_complex::Complex64;

/// Relative distance under which two roots are considered one multiple root.
pub const MULTIPLICITY_TOL: f64 = 1e-7;

/// Evaluate a polynomial given by coefficients in decreasing degree.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_c(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients of the derivative, decreasing degree.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (n - i) as f64)
        .collect()
}

/// All complex roots of a real polynomial (decreasing degree, leading
/// coefficient non-zero) by Aberth–Ehrlich iteration.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let coeffs: Vec<f64> = {
        let start = coeffs.iter().position(|c| *c != 0.0).unwrap_or(coeffs.len());
        coeffs[start..].to_vec()
    };
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    if degree == 1 {
        return vec![Complex64::new(-monic[1], 0.0)];
    }
    let dcoeffs = derivative(&monic);

    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let p = eval_c(&monic, z[i]);
            let dp = eval_c(&dcoeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 { ratio } else { ratio / denom };
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-16 {
            break;
        }
    }
    z
}

/// Newton polish of a real root; keeps the input when the derivative is
/// too small (multiple roots) or polishing makes the residual worse.
pub fn polish_real(coeffs: &[f64], x0: f64) -> f64 {
    let d = derivative(coeffs);
    let mut x = x0;
    let mut best = (eval(coeffs, x).abs(), x);
    for _ in 0..20 {
        let p = eval(coeffs, x);
        let dp = eval(&d, x);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() {
            break;
        }
        let r = eval(coeffs, next).abs();
        if r < best.0 {
            best = (r, next);
        }
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
        x = next;
    }
    best.1
}

/// A real root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// Group complex roots into sorted real roots with multiplicities. Roots whose
/// imaginary part is below `MULTIPLICITY_TOL·(1+|re|)` count as real.
pub fn real_roots_with_multiplicity(coeffs: &[f64], all: &[Complex64]) -> Vec<RealRoot> {
    let mut reals: Vec<f64> = all
        .iter()
        .filter(|z| z.im.abs() <= MULTIPLICITY_TOL * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut out: Vec<RealRoot> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    let flush = |cluster: &mut Vec<f64>, out: &mut Vec<RealRoot>| {
        if cluster.is_empty() {
            return;
        }
        let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
        let value = if cluster.len() == 1 {
            polish_real(coeffs, mean)
        } else {
            mean
        };
        out.push(RealRoot {
            value,
            multiplicity: cluster.len(),
        });
        cluster.clear();
    };
    for r in reals {
        if let Some(&last) = cluster.last() {
            if (r - last).abs() > MULTIPLICITY_TOL * (1.0 + r.abs().max(last.abs())) {
                flush(&mut cluster, &mut out);
            }
        }
        cluster.push(r);
    }
    flush(&mut cluster, &mut out);
    out
}

/// True when two of the given complex roots coincide within the multiplicity
/// tolerance.
pub fn has_multiple_root(all: &[Complex64]) -> bool {
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let scale = 1.0 + all[i].norm().max(all[j].norm());
            if (all[i] - all[j]).norm() <= MULTIPLICITY_TOL * scale {
                return true;
            }
        }
    }
    false
}

/// Roots of `P₃(x) = 4x³ − g₂x − g₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    /// Three distinct real roots, `e1 > e2 > e3`.
    ThreeReal { e1: f64, e2: f64, e3: f64 },
    /// One real root and a complex-conjugate pair; `upper` has positive
    /// imaginary part.
    OneReal { real: f64, upper: Complex64 },
    /// Multiple root (zero discriminant).
    Degenerate { simple: f64, double: f64 },
}

impl CubicRoots {
    pub fn real_roots(&self) -> Vec<f64> {
        match *self {
            CubicRoots::ThreeReal { e1, e2, e3 } => vec![e1, e2, e3],
            CubicRoots::OneReal { real, .. } => vec![real],
            CubicRoots::Degenerate { simple, double } => {
                if simple == double {
                    vec![simple]
                } else {
                    let mut v = vec![simple, double];
                    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    v
                }
            }
        }
    }

    pub fn largest_real(&self) -> f64 {
        self.real_roots()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn smallest_real(&self) -> f64 {
        self.real_roots().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Closed-form roots of the Weierstrass cubic, Newton-polished.
pub fn weierstrass_cubic_roots(g2: f64, g3: f64) -> CubicRoots {
    let coeffs = [4.0, 0.0, -g2, -g3];
    let disc = g2 * g2 * g2 - 27.0 * g3 * g3;
    let scale = (g2.abs().powi(3)).max(27.0 * g3 * g3);
    if disc.abs() <= 1e-14 * scale || scale == 0.0 {
        // x = 3g₃/g₂ is the double root, −6g₃/g₂ the simple one.
        if g2 == 0.0 {
            return CubicRoots::Degenerate {
                simple: 0.0,
                double: 0.0,
            };
        }
        return CubicRoots::Degenerate {
            simple: -6.0 * g3 / g2,
            double: 3.0 * g3 / g2,
        };
    }
    // Depressed form t³ + p t + q with p = −g₂/4, q = −g₃/4.
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q / (p * m)).clamp(-1.0, 1.0)).acos() / 3.0;
        let mut r: Vec<f64> = (0..3)
            .map(|k| {
                let t = m * (arg - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                polish_real(&coeffs, t)
            })
            .collect();
        r.sort_by(|a, b| b.partial_cmp(a).unwrap());
        CubicRoots::ThreeReal {
            e1: r[0],
            e2: r[1],
            e3: r[2],
        }
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let real = polish_real(&coeffs, (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt());
        let im2 = 0.75 * real * real - g2 / 4.0;
        CubicRoots::OneReal {
            real,
            upper: Complex64::new(-real / 2.0, im2.max(0.0).sqrt()),
        }
    }
}
