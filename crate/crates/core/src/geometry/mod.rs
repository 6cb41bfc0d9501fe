//! Space-form placement of the curve family, and the closed-form torus
//! invariants: Willmore energy, conformal class, enclosed area and the CMC
//! type of tori of revolution.

mod mesh;

pub use mesh::*;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::closing::{CaseTag, ClosingSolution};
use crate::curvegen::CurveFamily;
use crate::weierstrass::LatticeData;
use crate::{Error, Result};

/// Below this |G| the ambient space is treated as the Euclidean plane.
pub const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    PoincareDisc,
    UpperHalfPlane,
    RoundSphere,
    Plane,
}

/// One sample of a curve placed in a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    /// Point in the affine chart (may be huge near ∞ on the sphere).
    pub point: Complex64,
    /// Unit-norm homogeneous coordinates of the point.
    pub homogeneous: [Complex64; 2],
    pub kappa: f64,
}

/// A curve of the family placed isometrically in a model of curvature `g`.
#[derive(Debug, Clone)]
pub struct SpaceFormCurve {
    pub model: Model,
    pub g: f64,
    pub samples: Vec<CurveSample>,
    /// Complex factor `a` in `z ↦ a·z`; real positive except in the upper
    /// half plane, where it is a unit rotation.
    pub scale: Complex64,
    /// Curve length `2nω₁` covered by the samples.
    pub length: f64,
    /// Whether the chart is `γ̂²/γ̂¹` (the curve's complement side) rather
    /// than `γ̂¹/γ̂²`.
    pub swapped: bool,
    source: Source,
}

#[derive(Debug, Clone)]
enum Source {
    Family(CurveFamily),
    /// Exact data for the constant-curvature path.
    Circle(Circle),
}

#[derive(Debug, Clone, Copy)]
struct Circle {
    radius: f64,
    freq: f64,
    kappa: f64,
}

impl SpaceFormCurve {
    /// `|r|`, the real normalization factor.
    pub fn scale_r(&self) -> f64 {
        self.scale.norm()
    }

    /// Homogeneous coordinates `(a·γ̂¹, γ̂²)` and their derivative.
    pub fn homogeneous_jet(&self, x: f64) -> Result<([Complex64; 2], [Complex64; 2])> {
        let fam = match &self.source {
            Source::Family(f) => f,
            Source::Circle(c) => {
                let z = Complex64::from_polar(c.radius, c.freq * x);
            let one = Complex64::new(1.0, 0.0);
                return Ok((
                    [z, one],
                    [Complex64::new(0.0, c.freq) * z, Complex64::new(0.0, 0.0)],
                ));
            }
        };
        // Scale both components by a common factor to keep magnitudes sane.
        let [l1, l2] = fam.ln_curve_hat(x)?;
        let [d1, d2] = fam.log_derivatives(x)?;
        let shift = 0.5 * (l1.re + l2.re + self.scale.norm().ln());
        let (l1, l2, d1, d2) = if self.swapped {
            (l2, l1, d2, d1)
        } else {
            (l1, l2, d1, d2)
        };
        let w1 = self.scale * (l1 - shift).exp();
        let w2 = (l2 - shift).exp();
        Ok(([w1, w2], [w1 * d1, w2 * d2]))
    }

    /// Chart point and its derivative.
    pub fn point_jet(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let (w, dw) = self.homogeneous_jet(x)?;
        if w[1].norm() <= 1e-300 {
            return Err(Error::ChartSingularity { x });
        }
        let z = w[0] / w[1];
        Ok((z, (dw[0] * w[1] - w[0] * dw[1]) / (w[1] * w[1])))
    }

    /// Speed in the model metric.
    pub fn speed(&self, x: f64) -> Result<f64> {
        let (w, dw) = self.homogeneous_jet(x)?;
        Ok(model_speed(self.model, self.g, w, dw))
    }

    pub fn kappa(&self, x: f64) -> Result<f64> {
        match &self.source {
            Source::Circle(c) => Ok(c.kappa),
            Source::Family(f) => f.kappa(x),
        }
    }

    /// The generating family, unless this is an exact circle.
    pub fn family(&self) -> Option<&CurveFamily> {
        match &self.source {
            Source::Family(f) => Some(f),
            Source::Circle(_) => None,
        }
    }

    /// Period of the curvature.
    pub fn kappa_period(&self) -> f64 {
        match &self.source {
            Source::Family(f) => 2.0 * f.omega1(),
            Source::Circle(_) => self.length,
        }
    }
}

/// Model-metric speed from homogeneous coordinates and their derivative.
pub fn model_speed(model: Model, g: f64, w: [Complex64; 2], dw: [Complex64; 2]) -> f64 {
    let num = (dw[0] * w[1] - w[0] * dw[1]).norm();
    let (a, b) = (w[0].norm_sqr(), w[1].norm_sqr());
    match model {
        Model::RoundSphere => 2.0 * num / (g.sqrt() * (a + b)),
        Model::PoincareDisc => 2.0 * num / ((-g).sqrt() * (b - a)),
        Model::UpperHalfPlane => num / ((-g).sqrt() * (w[0] * w[1].conj()).im),
        Model::Plane => num / b,
    }
}

fn model_for(case: CaseTag, g: f64) -> Model {
    if g.abs() <= FLAT_TOL {
        return Model::Plane;
    }
    match case {
        CaseTag::Sphere => Model::RoundSphere,
        CaseTag::HyperbolicOrbitlike => Model::PoincareDisc,
        CaseTag::HyperbolicWavelike => Model::UpperHalfPlane,
    }
}

/// Scale factors making the speed 1 at `x = 0`.
fn candidate_scales(model: Model, g: f64, z: Complex64, dz: Complex64) -> Vec<Complex64> {
    let (m, d) = (z.norm(), dz.norm());
    let real = |r: f64| Complex64::new(r, 0.0);
    match model {
        Model::Plane => vec![real(1.0 / d)],
        Model::RoundSphere => {
            let s = g.sqrt();
            if m * m * s <= 1e-14 * d {
                return vec![real(s / (2.0 * d))];
            }
            let disc = d * d - g * m * m;
            if disc < 0.0 {
                return vec![];
            }
            let q = disc.sqrt();
            vec![real((d - q) / (s * m * m)), real((d + q) / (s * m * m))]
        }
        Model::PoincareDisc => {
            let s = (-g).sqrt();
            if m * m * s <= 1e-14 * d {
                return vec![real(s / (2.0 * d))];
            }
            vec![real((-d + (d * d - g * m * m).sqrt()) / (s * m * m))]
        }
        Model::UpperHalfPlane => {
            let c = d / (-g).sqrt();
            if c > m {
                return vec![];
            }
            let alpha = (c / m).asin();
            let phi = z.arg();
            vec![
                Complex64::from_polar(1.0, alpha - phi),
                Complex64::from_polar(1.0, PI - alpha - phi),
            ]
        }
    }
}

/// Place the family's curve in the model fixed by the closing case, scaled
/// (or rotated, in the upper half plane) to unit speed at `x = 0`.
pub fn normalize_to_spaceform(
    fam: &CurveFamily,
    sol: &ClosingSolution,
    samples_per_period: usize,
) -> Result<SpaceFormCurve> {
    let g = fam.params.g;
    let model = model_for(sol.case, g);
    let periods = sol.n.max(1) as u32;
    let length = 2.0 * periods as f64 * fam.omega1();
    let mut curve = SpaceFormCurve {
        model,
        g,
        samples: Vec::new(),
        scale: Complex64::new(1.0, 0.0),
        length,
        swapped: false,
        source: Source::Family(fam.clone()),
    };
    let probes: Vec<f64> = (1..=16).map(|k| length * k as f64 / 17.0).collect();
    let mut best: Option<(f64, Complex64, bool)> = None;
    for swapped in [false, true] {
        curve.swapped = swapped;
        curve.scale = Complex64::new(1.0, 0.0);
        let (z0, dz0) = curve.point_jet(0.0)?;
        for a in candidate_scales(model, g, z0, dz0) {
            curve.scale = a;
            let mut worst = 0.0f64;
            for &x in &probes {
                let s = curve.speed(x)?;
                worst = worst.max(if s.is_finite() && s > 0.0 {
                    (s - 1.0).abs()
                } else {
                    f64::INFINITY
                });
            }
            if best.map_or(true, |(w, _, _)| worst < w) {
                best = Some((worst, a, swapped));
            }
        }
    }
    let (_, a, swapped) = best.ok_or_else(|| {
        Error::IntegrationFailure("no scale gives unit speed at x = 0".into())
    })?;
    curve.scale = a;
    curve.swapped = swapped;
    let total = samples_per_period.max(1) * periods as usize;
    curve.samples = (0..=total)
        .map(|k| sample_at(&curve, length * k as f64 / total as f64))
        .collect::<Result<_>>()?;
    Ok(curve)
}

fn sample_at(curve: &SpaceFormCurve, x: f64) -> Result<CurveSample> {
    let (w, _) = curve.homogeneous_jet(x)?;
    let norm = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    let point = if w[1].norm() > 0.0 {
        w[0] / w[1]
    } else {
        Complex64::new(f64::INFINITY, 0.0)
    };
    Ok(CurveSample {
        x,
        point,
        homogeneous: [w[0] / norm, w[1] / norm],
        kappa: curve.kappa(x)?,
    })
}

/// Exact arclength-parametrized circle of geodesic curvature `kappa` about
/// the chart origin on a sphere (`g > 0`), the plane or the Poincaré disc
/// (`g < 0`, needs `|kappa| > √−g`). Used for constant-curvature data.
pub fn constant_curvature_circle(kappa: f64, g: f64, samples: usize) -> Result<SpaceFormCurve> {
    let (model, radius, length) = if g > FLAT_TOL {
        // Polar angle θ with cot θ = |κ|/√G; chart radius tan(θ/2). Negative
        // curvature is the same circle run clockwise.
        let theta = if kappa == 0.0 {
            PI / 2.0
        } else {
            (g.sqrt() / kappa.abs()).atan()
        };
        (Model::RoundSphere, (theta / 2.0).tan(), 2.0 * PI * theta.sin() / g.sqrt())
    } else if g < -FLAT_TOL {
        let s = (-g).sqrt();
        if kappa.abs() <= s {
            return Err(Error::InvalidArgument(format!(
                "curvature {kappa} does not close in H² of curvature {g}"
            )));
        }
        // coth r = |κ|/√−G; chart radius tanh(r/2).
        let r = (s / kappa.abs()).atanh();
        (Model::PoincareDisc, (r / 2.0).tanh(), 2.0 * PI * r.sinh() / s)
    } else {
        if kappa == 0.0 {
            return Err(Error::InvalidArgument("a straight line does not close".into()));
        }
        (Model::Plane, 1.0 / kappa.abs(), 2.0 * PI / kappa.abs())
    };
    let freq = if kappa < 0.0 { -2.0 * PI / length } else { 2.0 * PI / length };
    let circle = Circle {
        radius,
        freq,
        kappa,
    };
    let mut curve = SpaceFormCurve {
        model,
        g,
        samples: Vec::new(),
        scale: Complex64::new(1.0, 0.0),
        length,
        swapped: false,
        source: Source::Circle(circle),
    };
    let total = samples.max(1);
    curve.samples = (0..=total)
        .map(|k| sample_at(&curve, length * k as f64 / total as f64))
        .collect::<Result<_>>()?;
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusKind {
    Revolution,
    Hopf,
}

impl TorusKind {
    pub fn name(&self) -> &'static str {
        match self {
            TorusKind::Revolution => "revolution",
            TorusKind::Hopf => "hopf",
        }
    }
}

fn check_kind(sol: &ClosingSolution, kind: TorusKind) -> Result<()> {
    match (kind, sol.case) {
        (TorusKind::Hopf, CaseTag::Sphere) if sol.g > 0.0 => Ok(()),
        (TorusKind::Revolution, CaseTag::HyperbolicOrbitlike | CaseTag::HyperbolicWavelike)
            if sol.g < 0.0 =>
        {
            Ok(())
        }
        _ => Err(Error::KindMismatch(format!(
            "{} torus from a {} solution with G = {}",
            kind.name(),
            sol.case.name(),
            sol.g
        ))),
    }
}

/// Willmore energy of the Hopf torus over a circle of constant geodesic
/// curvature `kappa` in the sphere of curvature `g`: `(π/√G)(κ² + G)·L`.
/// The great circle gives `2π²`.
pub fn willmore_constant_curvature(kappa: f64, g: f64) -> Result<f64> {
    if g <= 0.0 {
        return Err(Error::NonSphericalCase);
    }
    let len = 2.0 * PI / (kappa * kappa + g).sqrt();
    Ok(PI / g.sqrt() * (kappa * kappa + g) * len)
}

/// Area of the cap bounded by a circle of curvature `kappa` (on its
/// left) in the sphere of curvature `g`: `2π(1 − cos θ)/G`, `cot θ = κ/√G`.
pub fn circle_enclosed_area(kappa: f64, g: f64) -> Result<f64> {
    if g <= 0.0 {
        return Err(Error::NonSphericalCase);
    }
    let cos = kappa / (kappa * kappa + g).sqrt();
    Ok(2.0 * PI * (1.0 - cos) / g)
}

/// `∫₀^{2nω₁} κ² dx` implied by the closed form: `16nη₁ − (2/3)(μ+G)·2nω₁`.
pub fn kappa_squared_integral(sol: &ClosingSolution, l: &LatticeData) -> f64 {
    let n = sol.n as f64;
    let s = 6.0 * l.wp_omega3();
    16.0 * n * l.eta1 - 2.0 / 3.0 * s * 2.0 * n * l.omega1
}

/// Closed-form Willmore energy.
///
/// Hopf: `(16nη₁π − 8nω₁Eπ)/√G`. Revolution: `(8nη₁π − 4nω₁℘(ω₃)π)/√|G|`,
/// i.e. `(π/2)∫κ²ds` after rescaling the profile to curvature −1.
pub fn willmore_energy(sol: &ClosingSolution, l: &LatticeData, kind: TorusKind) -> Result<f64> {
    check_kind(sol, kind)?;
    let n = sol.n as f64;
    Ok(match kind {
        TorusKind::Hopf => {
            (16.0 * n * l.eta1 * PI - 8.0 * n * l.omega1 * sol.e * PI) / sol.g.sqrt()
        }
        TorusKind::Revolution => {
            (8.0 * n * l.eta1 * PI - 4.0 * n * l.omega1 * l.wp_omega3() * PI) / (-sol.g).sqrt()
        }
    })
}

/// Periodic trapezoid rule over `[0, length]` (spectrally accurate for
/// smooth periodic integrands).
pub fn periodic_trapezoid<F>(f: F, length: f64, nodes: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = length / nodes as f64;
    let mut acc = 0.0;
    for k in 0..nodes {
        acc += f(h * k as f64)?;
    }
    Ok(acc * h)
}

/// Willmore energy by quadrature of the curvature of `fam` over `n` periods:
/// `(π/√G)∫(κ² + G)` (Hopf) or `(π/(2√|G|))∫κ²` (revolution).
pub fn willmore_by_quadrature(
    fam: &CurveFamily,
    sol: &ClosingSolution,
    kind: TorusKind,
    nodes_per_period: usize,
) -> Result<f64> {
    check_kind(sol, kind)?;
    let len = 2.0 * sol.n as f64 * fam.omega1();
    let nodes = nodes_per_period * sol.n as usize;
    let g = fam.params.g;
    let k2 = periodic_trapezoid(|x| Ok(fam.kappa(x)?.powi(2)), len, nodes)?;
    Ok(match kind {
        TorusKind::Hopf => PI / g.sqrt() * (k2 + g * len),
        TorusKind::Revolution => PI / (2.0 * (-g).sqrt()) * k2,
    })
}

/// Residual of `∫κ² + (2/3)(μ+G)·2nω₁ = 16nη₁`, relative to `16nη₁`.
pub fn energy_identity_defect(fam: &CurveFamily, n: i64, nodes_per_period: usize) -> Result<f64> {
    let len = 2.0 * n as f64 * fam.omega1();
    let k2 = periodic_trapezoid(|x| Ok(fam.kappa(x)?.powi(2)), len, nodes_per_period * n as usize)?;
    let lhs = k2 + 2.0 / 3.0 * fam.params.mu_plus_g() * len;
    let rhs = 16.0 * n as f64 * fam.lattice.eta1;
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Generators `(z₁, z₂)` of the conformal lattice: `z₁ = 2π`;
/// revolution `z₂ = i√|G|·L`; Hopf `z₂ = ½GA + ½i√G·L`.
pub fn conformal_class(
    sol: &ClosingSolution,
    l: &LatticeData,
    kind: TorusKind,
    area_a: f64,
) -> Result<(Complex64, Complex64)> {
    check_kind(sol, kind)?;
    let len = sol.length(l);
    let z1 = Complex64::new(2.0 * PI, 0.0);
    let z2 = match kind {
        TorusKind::Revolution => Complex64::new(0.0, (-sol.g).sqrt() * len),
        TorusKind::Hopf => Complex64::new(
            (0.5 * sol.g * area_a).rem_euclid(2.0 * PI),
            0.5 * sol.g.sqrt() * len,
        ),
    };
    Ok((z1, z2))
}

/// `½GA` (mod 2π) from the σ-monodromy: with `x₀ = it`,
/// `½GA ≡ mπ − 4nη₁t − nω₁κ₀ + 4nω₁·Im ζ(x₀)`.
pub fn half_ga_closed_form(sol: &ClosingSolution, fam: &CurveFamily) -> Result<f64> {
    if sol.case != CaseTag::Sphere {
        return Err(Error::NonSphericalCase);
    }
    let l = &fam.lattice;
    let n = sol.n as f64;
    let t = fam.x0.im;
    let v = sol.m as f64 * PI - 4.0 * n * l.eta1 * t - n * l.omega1 * fam.kappa0
        + 4.0 * n * l.omega1 * l.zeta(fam.x0)?.im;
    Ok(v.rem_euclid(2.0 * PI))
}

/// Oriented enclosed area `A`, reduced to `[0, 4π/G)`.
pub fn enclosed_area(sol: &ClosingSolution, fam: &CurveFamily) -> Result<f64> {
    let half = half_ga_closed_form(sol, fam)?;
    Ok(2.0 * half / sol.g)
}

/// `½GA` (mod 2π) from Gauss–Bonnet: `πm − ½∫κ ds`.
pub fn half_ga_gauss_bonnet(
    sol: &ClosingSolution,
    fam: &CurveFamily,
    nodes_per_period: usize,
) -> Result<f64> {
    if sol.case != CaseTag::Sphere {
        return Err(Error::NonSphericalCase);
    }
    let len = 2.0 * sol.n as f64 * fam.omega1();
    let k1 = periodic_trapezoid(|x| fam.kappa(x), len, nodes_per_period * sol.n as usize)?;
    Ok((sol.m as f64 * PI - 0.5 * k1).rem_euclid(2.0 * PI))
}

/// Difference of two angles on the circle, in `[0, π]`.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmcType {
    /// CMC in H³ with |H| < 1.
    H3SmallH,
    /// CMC in S³.
    S3,
    /// CMC in H³ with H > 1.
    H3LargeH,
}

impl CmcType {
    pub fn name(&self) -> &'static str {
        match self {
            CmcType::H3SmallH => "H3_small_H",
            CmcType::S3 => "S3",
            CmcType::H3LargeH => "H3_large_H",
        }
    }
}

/// CMC type of the torus of revolution over a hyperbolic profile with Sym
/// point `e`.
pub fn cmc_classify_sympoint(l: &LatticeData, e: f64) -> Result<CmcType> {
    if !l.is_orbitlike() {
        return Ok(CmcType::H3SmallH);
    }
    let p3 = l.inv.p3(e);
    let scale = 4.0 * e.abs().powi(3) + (l.inv.g2 * e).abs() + l.inv.g3.abs();
    if p3.abs() <= 1e-12 * scale.max(1.0) {
        return Err(Error::BranchPoint { e, p3 });
    }
    Ok(if p3 < 0.0 { CmcType::S3 } else { CmcType::H3LargeH })
}

pub fn cmc_classify(sol: &ClosingSolution, l: &LatticeData) -> Result<CmcType> {
    check_kind(sol, TorusKind::Revolution)?;
    cmc_classify_sympoint(l, sol.e)
}

/// Summary of a torus built from a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusReport {
    pub kind: TorusKind,
    pub willmore: f64,
    pub willmore_quadrature: f64,
    pub willmore_rel_gap: f64,
    pub energy_identity_defect: f64,
    pub z1: Complex64,
    pub z2: Complex64,
    pub length_l: f64,
    /// Enclosed area (Hopf only; `NaN` otherwise), reduced mod `4π/G`.
    pub area_a: f64,
    /// Gauss–Bonnet gap of `½GA` (Hopf only).
    pub area_gap: f64,
    pub cmc: Option<CmcType>,
    pub n: i64,
    pub m: i64,
}

pub fn torus_report(
    sol: &ClosingSolution,
    fam: &CurveFamily,
    kind: TorusKind,
    nodes_per_period: usize,
) -> Result<TorusReport> {
    let l = &fam.lattice;
    let w = willmore_energy(sol, l, kind)?;
    let wq = willmore_by_quadrature(fam, sol, kind, nodes_per_period)?;
    let (area, gap, cmc) = match kind {
        TorusKind::Hopf => {
            let a = enclosed_area(sol, fam)?;
            let gb = half_ga_gauss_bonnet(sol, fam, nodes_per_period)?;
            (a, angle_gap(0.5 * sol.g * a, gb), None)
        }
        TorusKind::Revolution => (f64::NAN, f64::NAN, Some(cmc_classify(sol, l)?)),
    };
    let (z1, z2) = conformal_class(sol, l, kind, if area.is_nan() { 0.0 } else { area })?;
    Ok(TorusReport {
        kind,
        willmore: w,
        willmore_quadrature: wq,
        willmore_rel_gap: (w - wq).abs() / w.abs(),
        energy_identity_defect: energy_identity_defect(fam, sol.n, nodes_per_period)?,
        z1,
        z2,
        length_l: sol.length(l),
        area_a: area,
        area_gap: gap,
        cmc,
        n: sol.n,
        m: sol.m,
    })
}
