//! Closing conditions: the monodromy angle `g(ρ) = η₁ρ − ζ(ρ)ω₁`, solvers
//! for the three admissible loci of ρ, the ambient curvature attached to a
//! Sym point, and isospectral families.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::curvegen::{self, CurveFamily};
use crate::elastica::{self, invariants_from_params, ElasticParams};
use crate::weierstrass::LatticeData;
use crate::{Error, Result};

/// Samples per monotone piece used to bracket sign changes.
pub const SCAN_SAMPLES: usize = 1024;
/// Bracket width at which bisection stops (relative to the segment length).
pub const BISECTION_TOL: f64 = 1e-12;
/// Required accuracy of `2g(ρ) = (m/n)πi`.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Sphere,
    HyperbolicOrbitlike,
    HyperbolicWavelike,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::Sphere => "sphere",
            CaseTag::HyperbolicOrbitlike => "hyp-orbit",
            CaseTag::HyperbolicWavelike => "hyp-wave",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sphere" => Some(CaseTag::Sphere),
            "hyp-orbit" => Some(CaseTag::HyperbolicOrbitlike),
            "hyp-wave" => Some(CaseTag::HyperbolicWavelike),
            _ => None,
        }
    }
}

/// Certificate of a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosingSolution {
    /// Winding number.
    pub m: i64,
    /// Lobe number; `gcd(m, n) = 1`.
    pub n: i64,
    /// How many times the requested (m, n) covered the primitive curve.
    pub cover: i64,
    pub rho: Complex64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub case: CaseTag,
    /// `|2g(ρ) − (m/n)πi|`.
    pub residual: f64,
}

impl ClosingSolution {
    /// Curve length `2nω₁` (arclength parametrization).
    pub fn length(&self, l: &LatticeData) -> f64 {
        2.0 * self.n as f64 * l.omega1
    }
}

/// `g(ρ) = η₁ρ − ζ(ρ)ω₁`.
pub fn monodromy_angle(rho: Complex64, l: &LatticeData) -> Result<Complex64> {
    Ok(l.eta1 * rho - l.zeta(rho)? * l.omega1)
}

/// `2g(ρ) − (m/n)πi`.
pub fn closing_residual(rho: Complex64, m: i64, n: i64, l: &LatticeData) -> Result<Complex64> {
    Ok(2.0 * monodromy_angle(rho, l)? - Complex64::new(0.0, PI * m as f64 / n as f64))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduce `(m, n)` to coprime form; returns `(m, n, cover)`.
pub fn normalize_mn(m: i64, n: i64) -> Result<(i64, i64, i64)> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("lobe number n = {n} must be positive")));
    }
    let k = gcd(m, n).max(1);
    Ok((m / k, n / k, k))
}

/// `G = 4(℘(ω₃) − E)` and `μ = 2℘(ω₃) + 4E` for the λ = 0 member.
pub fn spaceform_from_sympoint(e: f64, l: &LatticeData) -> Result<(f64, f64)> {
    let p3 = l.inv.p3(e);
    let scale = 4.0 * e.abs().powi(3) + (l.inv.g2 * e).abs() + l.inv.g3.abs();
    if p3.abs() <= 1e-12 * scale.max(1.0) {
        return Err(Error::BranchPoint { e, p3 });
    }
    let w3 = l.wp_omega3();
    Ok((4.0 * (w3 - e), 2.0 * w3 + 4.0 * e))
}

/// A straight piece `t ↦ base + dir·t`, `t ∈ (lo, hi)`, on which `2g − target`
/// has a fixed real or imaginary direction.
struct Piece {
    base: Complex64,
    dir: Complex64,
    lo: f64,
    hi: f64,
}

/// All roots in `t` of `f` on `(lo, hi)` bracketed by a dense scan.
fn scan_roots<F>(f: F, lo: f64, hi: f64) -> Vec<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let span = hi - lo;
    let margin = 1e-6 * span;
    let (a, b) = (lo + margin, hi - margin);
    let ts: Vec<f64> = (0..=SCAN_SAMPLES)
        .map(|k| a + (b - a) * k as f64 / SCAN_SAMPLES as f64)
        .collect();
    let vals: Vec<Option<f64>> = ts.iter().map(|&t| f(t)).collect();
    let mut out = Vec::new();
    for k in 0..SCAN_SAMPLES {
        let (Some(fa), Some(fb)) = (vals[k], vals[k + 1]) else {
            continue;
        };
        if fa == 0.0 {
            out.push(ts[k]);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        // A jump through a pole also flips sign; reject by magnitude below.
        let (mut x0, mut x1, mut f0) = (ts[k], ts[k + 1], fa);
        for _ in 0..200 {
            let mid = 0.5 * (x0 + x1);
            if (x1 - x0) <= BISECTION_TOL * span * 1e-3 || mid == x0 || mid == x1 {
                break;
            }
            match f(mid) {
                Some(fm) if fm.signum() == f0.signum() => {
                    x0 = mid;
                    f0 = fm;
                }
                Some(_) => x1 = mid,
                None => break,
            }
        }
        let t = 0.5 * (x0 + x1);
        if let Some(ft) = f(t) {
            if ft.abs() <= 1e-6 * (1.0 + fa.abs().min(fb.abs())) {
                out.push(t);
            }
        }
    }
    out
}

fn solve_on_pieces(
    l: &LatticeData,
    pieces: &[Piece],
    m: i64,
    n: i64,
    imaginary: bool,
) -> Vec<Complex64> {
    let target = PI * m as f64 / n as f64;
    let mut out = Vec::new();
    for p in pieces {
        let f = |t: f64| -> Option<f64> {
            let g2 = 2.0 * monodromy_angle(p.base + p.dir * t, l).ok()?;
            Some(if imaginary { g2.im - target } else { g2.re - target })
        };
        for t in scan_roots(f, p.lo, p.hi) {
            out.push(p.base + p.dir * t);
        }
    }
    out
}

fn finish(
    l: &LatticeData,
    rho: Complex64,
    m: i64,
    n: i64,
    cover: i64,
    case: CaseTag,
) -> Result<ClosingSolution> {
    // Snap to the exact locus: ρ is imaginary, on ω₁ + iℝ, or real.
    let rho = match case {
        CaseTag::Sphere => Complex64::new(0.0, rho.im),
        CaseTag::HyperbolicOrbitlike => Complex64::new(l.omega1, rho.im),
        CaseTag::HyperbolicWavelike => Complex64::new(rho.re, 0.0),
    };
    let e = l.wp(rho)?.re;
    let (g, _) = spaceform_from_sympoint(e, l)?;
    let residual = closing_residual(rho, m, n, l)?.norm();
    Ok(ClosingSolution {
        m,
        n,
        cover,
        rho,
        e,
        g,
        case,
        residual,
    })
}

fn require_nondegenerate(l: &LatticeData) -> Result<()> {
    if l.inv.is_degenerate() {
        return Err(Error::DegenerateLattice {
            g2: l.inv.g2,
            g3: l.inv.g3,
            disc: l.inv.disc,
        });
    }
    Ok(())
}

/// Every bracketed spherical solution `ρ ∈ i(0, 2|ω₃|)`, `ρ ≠ ω₃`.
pub fn solve_closing_sphere_all(l: &LatticeData, m: i64, n: i64) -> Result<Vec<ClosingSolution>> {
    require_nondegenerate(l)?;
    let (m, n, cover) = normalize_mn(m, n)?;
    let w3 = l.omega3.im;
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let pieces = [
        Piece { base: zero, dir: i, lo: 0.0, hi: w3 },
        Piece { base: zero, dir: i, lo: w3, hi: 2.0 * w3 },
    ];
    solve_on_pieces(l, &pieces, m, n, true)
        .into_iter()
        .map(|rho| finish(l, rho, m, n, cover, CaseTag::Sphere))
        .collect()
}

/// Closed curve on a round sphere (`G > 0`): ρ purely imaginary with
/// `2g(ρ) = (m/n)πi`.
pub fn solve_closing_sphere(l: &LatticeData, m: i64, n: i64) -> Result<ClosingSolution> {
    let all = solve_closing_sphere_all(l, m, n)?;
    pick(all, m, n)
}

/// Every bracketed solution `ρ = ω₁ + it`, `0 < |t| < 2|ω₃|`, `|t| ≠ |ω₃|`.
pub fn solve_closing_hyperbolic_orbitlike_all(
    l: &LatticeData,
    m: i64,
    n: i64,
) -> Result<Vec<ClosingSolution>> {
    require_nondegenerate(l)?;
    if !l.is_orbitlike() {
        return Err(Error::WrongDiscriminant { disc: l.inv.disc });
    }
    let (m, n, cover) = normalize_mn(m, n)?;
    let w3 = l.omega3.im;
    let i = Complex64::new(0.0, 1.0);
    let base = Complex64::new(l.omega1, 0.0);
    let pieces = [
        Piece { base, dir: i, lo: 0.0, hi: w3 },
        Piece { base, dir: i, lo: w3, hi: 2.0 * w3 },
        Piece { base, dir: -i, lo: 0.0, hi: w3 },
        Piece { base, dir: -i, lo: w3, hi: 2.0 * w3 },
    ];
    solve_on_pieces(l, &pieces, m, n, true)
        .into_iter()
        .map(|rho| finish(l, rho, m, n, cover, CaseTag::HyperbolicOrbitlike))
        .collect()
}

/// Closed curve in H² with rotational monodromy (`D > 0`, `E ∈ (e₂, e₁)`).
pub fn solve_closing_hyperbolic_orbitlike(
    l: &LatticeData,
    m: i64,
    n: i64,
) -> Result<ClosingSolution> {
    let all = solve_closing_hyperbolic_orbitlike_all(l, m, n)?;
    pick(all, m, n)
}

/// The existence criterion `−℘(ω₁) > η₁/ω₁` for the wavelike hyperbolic case.
pub fn wavelike_criterion(l: &LatticeData) -> bool {
    -l.wp_omega1() > l.eta1 / l.omega1
}

/// The unique real `ρ ∈ (0, ω₁)` with `ρη₁ − ζ(ρ)ω₁ = 0`, if it exists.
/// The partner `2ω₁ − ρ` gives the same curve and `ρ = ω₁` is excluded.
pub fn solve_closing_hyperbolic_wavelike(l: &LatticeData) -> Result<Option<ClosingSolution>> {
    require_nondegenerate(l)?;
    if l.is_orbitlike() {
        return Err(Error::WrongDiscriminant { disc: l.inv.disc });
    }
    if !wavelike_criterion(l) {
        return Ok(None);
    }
    let w1 = l.omega1;
    let f = |t: f64| -> Option<f64> { Some(monodromy_angle(Complex64::new(t, 0.0), l).ok()?.re) };
    // Stay clear of ω₁ itself, which is always a (rejected) root.
    let roots = scan_roots(f, 0.0, w1 * (1.0 - 1e-4));
    match roots.first() {
        Some(&t) => finish(l, Complex64::new(t, 0.0), 0, 1, 1, CaseTag::HyperbolicWavelike).map(Some),
        None => Ok(None),
    }
}

fn pick(all: Vec<ClosingSolution>, m: i64, n: i64) -> Result<ClosingSolution> {
    all.into_iter()
        .filter(|s| s.residual <= ANGLE_TOL)
        .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
        .ok_or(Error::TargetOutOfRange {
            target: m as f64 / n as f64,
        })
}

/// Solve for the given case; the wavelike hyperbolic case ignores `(m, n)`.
pub fn solve(l: &LatticeData, case: CaseTag, m: i64, n: i64) -> Result<Option<ClosingSolution>> {
    match case {
        CaseTag::Sphere => solve_closing_sphere(l, m, n).map(Some),
        CaseTag::HyperbolicOrbitlike => solve_closing_hyperbolic_orbitlike(l, m, n).map(Some),
        CaseTag::HyperbolicWavelike => solve_closing_hyperbolic_wavelike(l),
    }
}

/// The curve family of a solution on the λ = 0 representative.
pub fn family_of(sol: &ClosingSolution, l: &LatticeData) -> Result<CurveFamily> {
    CurveFamily::elastic(l.clone(), sol.rho)
}

/// Chordal distance on ℂP¹ between `[γ̂(2nω₁)]` and `[γ̂(0)]`.
pub fn projective_closure_defect(fam: &CurveFamily, n: i64) -> Result<f64> {
    let a = fam.curve_hat(0.0)?;
    let b = fam.curve_hat(2.0 * n as f64 * fam.omega1())?;
    let cross = (a[0] * b[1] - a[1] * b[0]).norm();
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    Ok(cross / (na * nb))
}

/// Isospectral deformation of a solution: `x₀ = t·x₀*` for
/// `t = 1 − k/steps`, `k = 0..steps`, where `x₀*` belongs to the λ = 0
/// representative (the first member).
pub fn isospectral_sweep(
    sol: &ClosingSolution,
    l: &LatticeData,
    steps: usize,
) -> Result<Vec<CurveFamily>> {
    let base = curvegen::representative_x0(l)?;
    let steps = steps.max(1);
    (0..steps)
        .map(|k| {
            let t = 1.0 - k as f64 / steps as f64;
            CurveFamily::new(l.clone(), base * t, sol.rho)
        })
        .collect()
}

/// Result of closing a curve inside a one-parameter family of λ = 0 data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySolution {
    pub params: ElasticParams,
    pub solution: ClosingSolution,
}

/// Close a wavelike spherical elastic curve with fixed μ, G and λ = 0 by
/// varying ν < 0. Here `E = (μ − G/2)/6` and `(μ+G)/6` must be the
/// smallest root of `P₃`, which holds for every ν on this slice.
pub fn solve_closing_in_family(mu: f64, g: f64, m: i64, n: i64) -> Result<FamilySolution> {
    if g <= 0.0 {
        return Err(Error::InvalidArgument("a spherical family needs G > 0".into()));
    }
    let (m, n, cover) = normalize_mn(m, n)?;
    let s = mu + g;
    let e = (mu - g / 2.0) / 6.0;
    let lattice_for = |nu: f64| -> Result<LatticeData> {
        let inv = invariants_from_params(&ElasticParams::new(mu, 0.0, nu, g));
        LatticeData::from_invariants(inv.g2, inv.g3)
    };
    // Residual of the closing condition at ν. ρ is the preimage of E on
    // i(0, |ω₃|), or its mirror 2ω₃ − ρ on i(|ω₃|, 2|ω₃|).
    let target = PI * m as f64 / n as f64;
    let eval = |nu: f64, mirror: bool| -> Option<(f64, Complex64, LatticeData)> {
        let l = lattice_for(nu).ok()?;
        if l.is_orbitlike() || (l.wp_omega3() - s / 6.0).abs() > 1e-8 * (1.0 + s.abs()) {
            return None;
        }
        let t = elastica::imaginary_preimage(&l, e).ok()?;
        let t = if mirror { 2.0 * l.omega3.im - t } else { t };
        let rho = Complex64::new(0.0, t);
        let g2 = 2.0 * monodromy_angle(rho, &l).ok()?;
        Some((g2.im - target, rho, l))
    };
    // ν < 0 keeps real roots of P₄; scan logarithmically in |ν| over several
    // decades.
    let nus: Vec<f64> = (0..=SCAN_SAMPLES)
        .map(|k| -(10f64).powf(-6.0 + 10.0 * k as f64 / SCAN_SAMPLES as f64) * (1.0 + s * s))
        .collect();
    for mirror in [false, true] {
        let vals: Vec<Option<f64>> = nus.iter().map(|&nu| eval(nu, mirror).map(|v| v.0)).collect();
        for k in 0..SCAN_SAMPLES {
            let (Some(fa), Some(fb)) = (vals[k], vals[k + 1]) else {
                continue;
            };
            if fa.signum() == fb.signum() {
                continue;
            }
            let (mut a, mut b, mut f_a) = (nus[k], nus[k + 1], fa);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid == a || mid == b {
                    break;
                }
                match eval(mid, mirror) {
                    Some((fm, _, _)) if fm.signum() == f_a.signum() => {
                        a = mid;
                        f_a = fm;
                    }
                    Some(_) => b = mid,
                    None => break,
                }
            }
            let nu = 0.5 * (a + b);
            let Some((_, rho, l)) = eval(nu, mirror) else { continue };
            let sol = finish(&l, rho, m, n, cover, CaseTag::Sphere)?;
            if sol.residual <= ANGLE_TOL {
                return Ok(FamilySolution {
                    params: ElasticParams::new(mu, 0.0, nu, g),
                    solution: sol,
                });
            }
        }
    }
    Err(Error::TargetOutOfRange {
        target: m as f64 / n as f64,
    })
}
