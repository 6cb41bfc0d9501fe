//! The explicit curve family `γ̂_E` built from σ and ζ, its Schwarzian
//! derivative, and the geodesic curvature recovered from ζ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elastica::{self, ElasticParams};
use crate::weierstrass::LatticeData;
use crate::{Error, Result};

/// Default number of samples per period of ℘.
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 256;

/// Everything needed to evaluate one member `γ_E` of the family.
#[derive(Debug, Clone)]
pub struct CurveFamily {
    pub lattice: LatticeData,
    pub x0: Complex64,
    pub rho: Complex64,
    /// Sym point `E = ℘(ρ)`.
    pub e: f64,
    /// Parameters of the isospectral member fixed by `x₀` and `E`.
    pub params: ElasticParams,
    /// `κ(0)`.
    pub kappa0: f64,
    kappa_shift: f64,
    zeta_rho: Complex64,
}

/// One sample of the projective curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveSample {
    pub x: f64,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    pub q: Complex64,
    pub kappa: f64,
}

/// Lift and first derivative at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct LiftJet {
    pub gamma: [Complex64; 2],
    pub gamma_prime: [Complex64; 2],
}

impl CurveFamily {
    /// Family for initial point `x₀` (off `½Γ + ℝ`) and spectral parameter `ρ`.
    pub fn new(lattice: LatticeData, x0: Complex64, rho: Complex64) -> Result<Self> {
        elastica::check_x0(&lattice, x0)?;
        let v = lattice.values(rho)?;
        let e = v.wp.re;
        let p3 = lattice.inv.p3(e);
        let scale = 4.0 * e.abs().powi(3) + (lattice.inv.g2 * e).abs() + lattice.inv.g3.abs();
        if v.wp_prime.norm() <= 1e-7 * scale.max(1.0).sqrt() {
            return Err(Error::BranchPoint { e, p3 });
        }
        let kappa0 = elastica::kappa0_from_x0(&lattice, x0)?;
        let params = elastica::isospectral_params(&lattice, x0, e)?;
        let kappa_shift = kappa0 - 4.0 * lattice.zeta(x0)?.im;
        Ok(CurveFamily {
            x0,
            rho,
            e,
            params,
            kappa0,
            kappa_shift,
            zeta_rho: v.zeta,
            lattice,
        })
    }

    /// Family on the λ = 0 representative of the lattice, started at the
    /// largest positive root of `P₄`.
    pub fn elastic(lattice: LatticeData, rho: Complex64) -> Result<Self> {
        let x0 = representative_x0(&lattice)?;
        Self::new(lattice, x0, rho)
    }

    pub fn omega1(&self) -> f64 {
        self.lattice.omega1
    }

    /// Logarithms of the two components (branch unspecified).
    pub fn ln_curve_hat(&self, x: f64) -> Result<[Complex64; 2]> {
        let u = self.x0 + x;
        let l = &self.lattice;
        let ls = l.ln_sigma(u)?;
        Ok([
            l.ln_sigma(u - self.rho)? - ls + self.zeta_rho * u,
            l.ln_sigma(u + self.rho)? - ls - self.zeta_rho * u,
        ])
    }

    /// `(γ̂¹, γ̂²)` at `x`.
    pub fn curve_hat(&self, x: f64) -> Result<[Complex64; 2]> {
        let [a, b] = self.ln_curve_hat(x)?;
        Ok([a.exp(), b.exp()])
    }

    /// Logarithmic derivatives `γ̂ⁱ′/γ̂ⁱ`.
    pub fn log_derivatives(&self, x: f64) -> Result<[Complex64; 2]> {
        let u = self.x0 + x;
        let l = &self.lattice;
        let z = l.zeta(u)?;
        Ok([
            l.zeta(u - self.rho)? - z + self.zeta_rho,
            l.zeta(u + self.rho)? - z - self.zeta_rho,
        ])
    }

    pub fn jet(&self, x: f64) -> Result<LiftJet> {
        let g = self.curve_hat(x)?;
        let d = self.log_derivatives(x)?;
        Ok(LiftJet {
            gamma: g,
            gamma_prime: [g[0] * d[0], g[1] * d[1]],
        })
    }

    /// `det(γ̂, γ̂′) = γ̂¹γ̂²′ − γ̂²γ̂¹′`.
    pub fn wronskian(&self, x: f64) -> Result<Complex64> {
        let j = self.jet(x)?;
        Ok(j.gamma[0] * j.gamma_prime[1] - j.gamma[1] * j.gamma_prime[0])
    }

    /// Affine chart `γ̂¹/γ̂²` and its derivative.
    pub fn affine(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let [a, b] = self.ln_curve_hat(x)?;
        let [da, db] = self.log_derivatives(x)?;
        let z = (a - b).exp();
        Ok((z, z * (da - db)))
    }

    /// Schwarzian derivative `q_E = −2℘(x + x₀) − E`.
    pub fn schwarzian(&self, x: f64) -> Result<Complex64> {
        Ok(-2.0 * self.lattice.wp(self.x0 + x)? - self.e)
    }

    /// Derivative of the Schwarzian, `−2℘′(x + x₀)`.
    pub fn schwarzian_prime(&self, x: f64) -> Result<Complex64> {
        Ok(-2.0 * self.lattice.wp_prime(self.x0 + x)?)
    }

    /// Geodesic curvature `κ(x) = 4·Im ζ(x + x₀) + const`, `κ(0) = κ₀`.
    pub fn kappa(&self, x: f64) -> Result<f64> {
        Ok(4.0 * self.lattice.zeta(self.x0 + x)?.im + self.kappa_shift)
    }

    /// `κ′(x) = −4·Im ℘(x + x₀)`.
    pub fn kappa_prime(&self, x: f64) -> Result<f64> {
        Ok(-4.0 * self.lattice.wp(self.x0 + x)?.im)
    }

    /// `κ″(x) = −4·Im ℘′(x + x₀)`.
    pub fn kappa_second(&self, x: f64) -> Result<f64> {
        Ok(-4.0 * self.lattice.wp_prime(self.x0 + x)?.im)
    }

    pub fn sample(&self, x: f64) -> Result<ProjectiveSample> {
        let [gamma1, gamma2] = self.curve_hat(x)?;
        Ok(ProjectiveSample {
            x,
            gamma1,
            gamma2,
            q: self.schwarzian(x)?,
            kappa: self.kappa(x)?,
        })
    }

    /// Uniform samples over `[0, 2·periods·ω₁]`, endpoint included.
    pub fn samples(&self, periods: u32, per_period: usize) -> Result<Vec<ProjectiveSample>> {
        let total = per_period.max(1) * periods.max(1) as usize;
        let len = 2.0 * periods.max(1) as f64 * self.omega1();
        (0..=total)
            .map(|k| self.sample(len * k as f64 / total as f64))
            .collect()
    }

    /// Multiplier of `γ̂¹` over one period, `exp(−2η₁ρ + 2ζ(ρ)ω₁)`.
    pub fn monodromy_multiplier(&self) -> Complex64 {
        (-2.0 * self.lattice.eta1 * self.rho + 2.0 * self.zeta_rho * self.omega1()).exp()
    }
}

/// `x₀` of the λ = 0 representative started at its largest root of `P₄`.
pub fn representative_x0(lattice: &LatticeData) -> Result<Complex64> {
    let p = elastica::elastic_representative(lattice)?;
    let roots = elastica::quartic_real_roots(&p);
    let kappa0 = roots
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    if !kappa0.is_finite() {
        return Err(Error::InvalidArgument(
            "elastic representative has no real curvature".into(),
        ));
    }
    elastica::x0_from_kappa0(&p, lattice, kappa0)
}

/// Miura map `iκ′/2 + κ²/4 + G/4`.
pub fn miura(kappa: f64, kappa_prime: f64, g: f64) -> Complex64 {
    Complex64::new(kappa * kappa / 4.0 + g / 4.0, kappa_prime / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lemniscatic_family() -> CurveFamily {
        let l = LatticeData::from_invariants(4.0, 0.0).unwrap();
        let rho = Complex64::new(0.0, 0.6);
        CurveFamily::elastic(l, rho).unwrap()
    }

    #[test]
    fn miura_examples() {
        assert_eq!(miura(0.0, 0.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(miura(2.0, 0.0, 1.0), Complex64::new(1.25, 0.0));
    }

    #[test]
    fn kappa_starts_at_largest_root() {
        let f = lemniscatic_family();
        let big = (12.0 + 128f64.sqrt()).sqrt();
        assert!((f.kappa(0.0).unwrap() - big).abs() < 1e-9);
        assert!(f.kappa_prime(0.0).unwrap().abs() < 1e-12);
        assert!(f.params.lambda.abs() < 1e-9);
    }

    #[test]
    fn swapping_rho_swaps_components() {
        let f = lemniscatic_family();
        let g = CurveFamily::new(f.lattice.clone(), f.x0, -f.rho).unwrap();
        for x in [0.1, 0.7, 1.9] {
            let a = f.curve_hat(x).unwrap();
            let b = g.curve_hat(x).unwrap();
            assert!((a[0] - b[1]).norm() <= 1e-10 * a[0].norm());
            assert!((a[1] - b[0]).norm() <= 1e-10 * a[1].norm());
        }
    }

    #[test]
    fn miura_matches_schwarzian() {
        let f = lemniscatic_family();
        for k in 0..20 {
            let x = 0.17 * k as f64;
            let m = miura(f.kappa(x).unwrap(), f.kappa_prime(x).unwrap(), f.params.g);
            let q = f.schwarzian(x).unwrap();
            assert!((m - q).norm() < 1e-9 * (1.0 + q.norm()), "{m} vs {q}");
        }
    }

    #[test]
    fn branch_point_rejected() {
        let l = LatticeData::from_invariants(4.0, 0.0).unwrap();
        let w3 = l.omega3;
        assert!(matches!(
            CurveFamily::elastic(l, w3),
            Err(Error::BranchPoint { .. })
        ));
    }
}
