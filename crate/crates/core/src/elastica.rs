//! Parameter algebra of constrained elastic curves: Euler–Lagrange data,
//! KdV coefficients, roots of `P₄`, solution classification and the initial
//! point `x₀` of the Weierstrass parametrization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::{self, RealRoot, MULTIPLICITY_TOL};
use crate::weierstrass::{LatticeData, LatticeInvariants};
use crate::{Error, Result};

/// Tolerance on `|P₄(κ₀)|` (relative to the size of its terms) for `κ₀` to
/// count as a root.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;

/// Multipliers and integration constant of `(κ′)² + P₄(κ) = 0` with
/// `P₄(x) = ¼x⁴ + (μ+G)x² + 2λx + ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticParams {
    /// Length-constraint multiplier μ.
    pub mu: f64,
    /// Area-constraint multiplier λ.
    pub lambda: f64,
    /// Integration constant ν.
    pub nu: f64,
    /// Curvature G of the ambient space form.
    #[serde(rename = "G")]
    pub g: f64,
}

impl ElasticParams {
    pub fn new(mu: f64, lambda: f64, nu: f64, g: f64) -> Self {
        ElasticParams { mu, lambda, nu, g }
    }

    /// μ + G, the only combination of μ and G that enters `P₄`.
    pub fn mu_plus_g(&self) -> f64 {
        self.mu + self.g
    }

    /// Coefficients of `P₄` in decreasing degree.
    pub fn p4_coeffs(&self) -> [f64; 5] {
        [0.25, 0.0, self.mu_plus_g(), 2.0 * self.lambda, self.nu]
    }

    pub fn p4(&self, x: f64) -> f64 {
        poly::eval(&self.p4_coeffs(), x)
    }

    pub fn p4_prime(&self, x: f64) -> f64 {
        x * x * x + 2.0 * self.mu_plus_g() * x + 2.0 * self.lambda
    }

    /// Sum of the magnitudes of the terms of `P₄(x)`; the natural scale for
    /// residuals.
    pub fn p4_scale(&self, x: f64) -> f64 {
        0.25 * x.powi(4) + (self.mu_plus_g() * x * x).abs() + (2.0 * self.lambda * x).abs() + self.nu.abs()
    }

    /// Same `P₄` expressed on a space form of curvature `g` (μ+G is kept).
    pub fn with_space_form(&self, g: f64) -> Self {
        ElasticParams {
            mu: self.mu_plus_g() - g,
            g,
            ..*self
        }
    }
}

/// Coefficients of `(q′)² + 2q³ + cq² + 2dq + e = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdVCoeffs {
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl KdVCoeffs {
    /// Left-hand side of the stationary KdV equation.
    pub fn residual(&self, q: Complex64, q_prime: Complex64) -> Complex64 {
        q_prime * q_prime + 2.0 * q * q * q + self.c * q * q + 2.0 * self.d * q + self.e
    }

    /// Magnitude scale matching [`KdVCoeffs::residual`].
    pub fn scale(&self, q: Complex64, q_prime: Complex64) -> f64 {
        q_prime.norm_sqr()
            + 2.0 * q.norm().powi(3)
            + (self.c * q.norm_sqr()).abs()
            + (2.0 * self.d * q.norm()).abs()
            + self.e.abs()
    }
}

pub fn kdv_from_params(p: &ElasticParams) -> KdVCoeffs {
    let ElasticParams { mu, lambda, nu, g } = *p;
    let c = mu - g / 2.0;
    let d = -nu / 4.0 - g * g / 16.0 - mu * g / 4.0;
    let e = c * d + lambda * lambda / 4.0 + mu * mu * g / 4.0 - nu * g / 4.0;
    KdVCoeffs { c, d, e }
}

pub fn invariants_from_params(p: &ElasticParams) -> LatticeInvariants {
    let s = p.mu_plus_g();
    let g2 = s * s / 12.0 + p.nu / 4.0;
    let g3 = s * s * s / 216.0 + p.lambda * p.lambda / 16.0 - p.nu * s / 24.0;
    LatticeInvariants::new(g2, g3)
}

/// Non-leading coefficients `[a₂, a₁, a₀]` of the monic cubic resolvent
/// `s³ + 8(μ+G)s² + 16((μ+G)² − ν)s − 64λ²`.
pub fn cubic_resolvent(p: &ElasticParams) -> [f64; 3] {
    let s = p.mu_plus_g();
    [8.0 * s, 16.0 * (s * s - p.nu), -64.0 * p.lambda * p.lambda]
}

/// Image of a resolvent root under `16x = s + (8/3)(μ+G)`; lands on a root of `P₃`.
pub fn resolvent_to_p3(p: &ElasticParams, s: Complex64) -> Complex64 {
    (s + 8.0 / 3.0 * p.mu_plus_g()) / 16.0
}

/// Sorted real roots of `P₄` with multiplicities.
pub fn quartic_real_roots(p: &ElasticParams) -> Vec<RealRoot> {
    let coeffs = p.p4_coeffs();
    let all = poly::roots(&coeffs);
    poly::real_roots_with_multiplicity(&coeffs, &all)
}

fn p4_has_multiple_root(p: &ElasticParams) -> bool {
    poly::has_multiple_root(&poly::roots(&p.p4_coeffs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    /// `P₄` has a real root, so a real curvature function exists.
    pub exists: bool,
    /// `(μ+G)/6` is at most every real root of `P₃`.
    pub criterion_holds: bool,
    /// `(μ+G)/6` equals the smallest real root of `P₃` (happens iff λ = 0).
    pub on_boundary: bool,
    pub real_roots: Vec<f64>,
    pub reason: String,
}

/// Decide whether the stationary mKdV equation has a real solution, and
/// report the cubic criterion alongside.
pub fn real_solution_exists(p: &ElasticParams) -> ExistenceReport {
    let roots: Vec<f64> = quartic_real_roots(p).iter().map(|r| r.value).collect();
    let inv = invariants_from_params(p);
    let p3_roots = inv.roots().real_roots();
    let t = p.mu_plus_g() / 6.0;
    let tol = 1e-10 * (1.0 + t.abs());
    let min_root = p3_roots.iter().cloned().fold(f64::INFINITY, f64::min);
    let criterion_holds = p3_roots.iter().all(|&e| t <= e + tol);
    let on_boundary = (t - min_root).abs() <= 1e-8 * (1.0 + t.abs());
    let exists = !roots.is_empty();
    let reason = if exists {
        format!("P4 has {} real root(s)", roots.len())
    } else if inv.disc > 0.0 {
        "no orbitlike solution: P4 has no real roots".to_string()
    } else {
        "no real solution: P4 has no real roots".to_string()
    };
    ExistenceReport {
        exists,
        criterion_holds,
        on_boundary,
        real_roots: roots,
        reason,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum SolutionClass {
    Wavelike,
    Orbitlike,
    ConstantCurvature { kappa0: f64 },
    /// Multiple root of `P₄` with a simple initial value; `periodic` is false
    /// whenever λ = 0.
    Asymptotic { periodic: bool },
}

impl SolutionClass {
    pub fn name(&self) -> &'static str {
        match self {
            SolutionClass::Wavelike => "Wavelike",
            SolutionClass::Orbitlike => "Orbitlike",
            SolutionClass::ConstantCurvature { .. } => "ConstantCurvature",
            SolutionClass::Asymptotic { .. } => "Asymptotic",
        }
    }
}

fn check_root(p: &ElasticParams, kappa0: f64) -> Result<()> {
    let residual = p.p4(kappa0);
    if residual.abs() > ROOT_RESIDUAL_TOL * p.p4_scale(kappa0).max(1.0) {
        return Err(Error::InvalidInitialValue { kappa0, residual });
    }
    Ok(())
}

/// Multiplicity of `kappa0` as a root of `P₄`, using the shared clustering
/// tolerance.
fn root_multiplicity(p: &ElasticParams, kappa0: f64) -> usize {
    let all = poly::roots(&p.p4_coeffs());
    all.iter()
        .filter(|z| (*z - kappa0).norm() <= MULTIPLICITY_TOL.sqrt() * (1.0 + kappa0.abs()))
        .count()
}

pub fn classify(p: &ElasticParams, kappa0: f64) -> Result<SolutionClass> {
    check_root(p, kappa0)?;
    let inv = invariants_from_params(p);
    if inv.is_degenerate() || p4_has_multiple_root(p) {
        // A multiple root of P₄ is a zero of P₄′ as well.
        let d = p.p4_prime(kappa0).abs();
        let scale = kappa0.abs().powi(3) + (2.0 * p.mu_plus_g() * kappa0).abs() + 2.0 * p.lambda.abs();
        if d <= 1e-6 * scale.max(1.0) || root_multiplicity(p, kappa0) > 1 {
            return Ok(SolutionClass::ConstantCurvature { kappa0 });
        }
        return Ok(SolutionClass::Asymptotic {
            periodic: p.lambda != 0.0,
        });
    }
    Ok(if inv.disc < 0.0 {
        SolutionClass::Wavelike
    } else {
        SolutionClass::Orbitlike
    })
}

/// The λ = 0 parameters sharing the lattice of `l`: `(μ+G) = 6℘(ω₃)`,
/// `ν = 4g₂ − 12℘(ω₃)²`. G is left at 0; see [`ElasticParams::with_space_form`].
pub fn elastic_representative(l: &LatticeData) -> Result<ElasticParams> {
    if l.inv.is_degenerate() {
        return Err(Error::DegenerateLattice {
            g2: l.inv.g2,
            g3: l.inv.g3,
            disc: l.inv.disc,
        });
    }
    let w3 = l.wp_omega3();
    Ok(ElasticParams {
        mu: 6.0 * w3,
        lambda: 0.0,
        nu: 4.0 * l.inv.g2 - 12.0 * w3 * w3,
        g: 0.0,
    })
}

/// `κ(0)` of the curvature function attached to an imaginary `x₀`:
/// `(6℘(x₀)² − g₂/2) / Im ℘′(x₀)`.
pub fn kappa0_from_x0(l: &LatticeData, x0: Complex64) -> Result<f64> {
    check_x0(l, x0)?;
    let v = l.values(x0)?;
    Ok((6.0 * v.wp.re * v.wp.re - l.inv.g2 / 2.0) / v.wp_prime.im)
}

/// Rejects `x₀` on a horizontal line along which `℘` is real, i.e. through a
/// half-period: `Im x₀ ∈ |ω₃|·ℤ` for both discriminant signs.
pub fn check_x0(l: &LatticeData, x0: Complex64) -> Result<()> {
    let step = l.omega3.im;
    let k = x0.im / step;
    if (k - k.round()).abs() * step <= 1e-9 * l.omega1.max(1.0) {
        return Err(Error::InvalidX0 {
            x0: format!("{x0}"),
        });
    }
    Ok(())
}

/// `x₀` on the imaginary segment with `℘(x₀) = −κ₀²/8 − (μ+G)/12`.
///
/// The sign of `Im x₀` is chosen so that the curvature function built from
/// `x₀` starts at `κ₀` rather than `−κ₀`; `|x₀|` is the unique point of
/// `(0, |ω₃|)` attaining the target.
pub fn x0_from_kappa0(p: &ElasticParams, l: &LatticeData, kappa0: f64) -> Result<Complex64> {
    check_root(p, kappa0)?;
    let target = -kappa0 * kappa0 / 8.0 - p.mu_plus_g() / 12.0;
    let t = imaginary_preimage(l, target)?;
    let x0 = Complex64::new(0.0, t);
    let k = kappa0_from_x0(l, x0)?;
    let agree = |a: f64, b: f64| (a - b).abs() <= 1e-6 * (1.0 + b.abs());
    if agree(k, kappa0) {
        Ok(x0)
    } else if agree(-k, kappa0) {
        Ok(-x0)
    } else {
        Err(Error::InvalidInitialValue {
            kappa0,
            residual: (k.abs() - kappa0.abs()).abs(),
        })
    }
}

/// Parameters of the isospectral member with initial point `x₀` and Sym
/// point `E`: `(μ+G) = 12b` with `b = −℘(x₀) − κ₀²/8`, ν from `g₂`, λ from
/// the second-order equation at `x = 0`, and `G = 4((μ+G)/6 − E)`.
pub fn isospectral_params(l: &LatticeData, x0: Complex64, e: f64) -> Result<ElasticParams> {
    let kappa0 = kappa0_from_x0(l, x0)?;
    let v = l.values(x0)?;
    let s = 12.0 * (-v.wp.re - kappa0 * kappa0 / 8.0);
    let nu = 4.0 * (l.inv.g2 - s * s / 12.0);
    let kappa_pp = -4.0 * v.wp_prime.im;
    let lambda = -kappa_pp - 0.5 * kappa0.powi(3) - s * kappa0;
    let g = 4.0 * (s / 6.0 - e);
    Ok(ElasticParams {
        mu: s - g,
        lambda,
        nu,
        g,
    })
}

/// `t ∈ (0, |ω₃|)` with `℘(it) = target`; `℘(it)` increases from −∞ to `℘(ω₃)`.
pub fn imaginary_preimage(l: &LatticeData, target: f64) -> Result<f64> {
    let top = l.omega3.im;
    let f = |t: f64| -> Result<f64> { Ok(l.wp(Complex64::new(0.0, t))?.re - target) };
    if target >= l.wp_omega3() {
        return Err(Error::NoSolutionOnSegment { target });
    }
    let mut hi = top;
    // Lower end: ℘(it) ≈ −1/t² near 0.
    let mut lo = (1.0 / (target.abs() + 1.0).sqrt()).min(0.5 * top);
    let mut guard = 0;
    while f(lo)? > 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 200 || lo < l.pole_cutoff * l.omega1 * 10.0 {
            return Err(Error::NoSolutionOnSegment { target });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    if t <= 0.0 || t >= top {
        return Err(Error::NoSolutionOnSegment { target });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kdv_examples() {
        let k = kdv_from_params(&ElasticParams::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!((k.c, k.d, k.e), (-0.5, -1.0 / 16.0, 1.0 / 32.0));
        let k = kdv_from_params(&ElasticParams::new(-6.0, 0.0, 4.0, 0.0));
        assert_eq!((k.c, k.d, k.e), (-6.0, -1.0, 6.0));
    }

    #[test]
    fn invariants_examples() {
        let inv = invariants_from_params(&ElasticParams::new(-6.0, 0.0, 4.0, 0.0));
        assert!(close(inv.g2, 4.0, 1e-14) && close(inv.g3, 0.0, 1e-14));
        let r = cubic_resolvent(&ElasticParams::new(-6.0, 0.0, 4.0, 0.0));
        assert_eq!(r, [-48.0, 512.0, 0.0]);
    }

    #[test]
    fn biquadratic_roots() {
        let roots = quartic_real_roots(&ElasticParams::new(-6.0, 0.0, 4.0, 0.0));
        assert_eq!(roots.len(), 4);
        let big = (12.0 + 128f64.sqrt()).sqrt();
        let small = (12.0 - 128f64.sqrt()).sqrt();
        let expect = [-big, -small, small, big];
        for (r, e) in roots.iter().zip(expect) {
            assert!(close(r.value, e, 1e-12), "{} vs {e}", r.value);
        }
        assert!(quartic_real_roots(&ElasticParams::new(0.0, 0.0, 1.0, 1.0)).is_empty());
    }

    #[test]
    fn classification_examples() {
        let p = ElasticParams::new(-6.0, 0.0, 4.0, 0.0);
        let k = (12.0 + 128f64.sqrt()).sqrt();
        assert_eq!(classify(&p, k).unwrap(), SolutionClass::Orbitlike);
        assert!(matches!(classify(&p, 1.0), Err(Error::InvalidInitialValue { .. })));

        let constant = ElasticParams::new(0.5, -1.0, 1.25, 0.0);
        assert_eq!(
            classify(&constant, 1.0).unwrap(),
            SolutionClass::ConstantCurvature { kappa0: 1.0 }
        );
        let asym = ElasticParams::new(-1.0, 0.0, 0.0, 0.0);
        assert_eq!(
            classify(&asym, 2.0).unwrap(),
            SolutionClass::Asymptotic { periodic: false }
        );
    }

    #[test]
    fn representative_round_trip() {
        let l = LatticeData::from_invariants(4.0, 0.0).unwrap();
        let p = elastic_representative(&l).unwrap();
        assert!(close(p.mu_plus_g(), -6.0, 1e-12) && close(p.nu, 4.0, 1e-12));
        let inv = invariants_from_params(&p);
        assert!(close(inv.g2, 4.0, 1e-10) && close(inv.g3, 0.0, 1e-10));
    }

    #[test]
    fn x0_for_outer_root_only() {
        let l = LatticeData::from_invariants(4.0, 0.0).unwrap();
        let p = ElasticParams::new(-6.0, 0.0, 4.0, 0.0);
        let big = (12.0 + 128f64.sqrt()).sqrt();
        let x0 = x0_from_kappa0(&p, &l, big).unwrap();
        assert_eq!(x0.re, 0.0);
        let target = -(12.0 + 128f64.sqrt()) / 8.0 + 0.5;
        assert!((l.wp(x0).unwrap().re - target).abs() < 1e-10);
        assert!(close(kappa0_from_x0(&l, x0).unwrap(), big, 1e-9));
        let xm = x0_from_kappa0(&p, &l, -big).unwrap();
        assert!((xm + x0).norm() < 1e-14);
        let small = (12.0 - 128f64.sqrt()).sqrt();
        assert!(matches!(
            x0_from_kappa0(&p, &l, small),
            Err(Error::NoSolutionOnSegment { .. })
        ));
    }

    #[test]
    fn isospectral_member_reproduces_representative() {
        let l = LatticeData::from_invariants(4.0, 0.0).unwrap();
        let p = elastic_representative(&l).unwrap();
        let big = (12.0 + 128f64.sqrt()).sqrt();
        let x0 = x0_from_kappa0(&p, &l, big).unwrap();
        let q = isospectral_params(&l, x0, -2.0).unwrap();
        assert!(close(q.mu_plus_g(), -6.0, 1e-9));
        assert!(close(q.nu, 4.0, 1e-9));
        assert!(q.lambda.abs() < 1e-9);
        assert!(close(q.g, 4.0, 1e-9));
        // Another point of the segment keeps the invariants.
        let q = isospectral_params(&l, x0 * 0.5, -2.0).unwrap();
        let inv = invariants_from_params(&q);
        assert!(close(inv.g2, 4.0, 1e-9) && close(inv.g3, 0.0, 1e-9));
        assert!(q.lambda.abs() > 1e-3);
    }

    #[test]
    fn forbidden_x0() {
        let l = LatticeData::from_invariants(4.0, 0.0).unwrap();
        assert!(check_x0(&l, Complex64::new(0.3, 0.0)).is_err());
        assert!(check_x0(&l, l.omega3 + 0.2).is_err());
        assert!(check_x0(&l, Complex64::new(0.0, 0.4)).is_ok());
    }
}
