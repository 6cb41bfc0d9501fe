//! Weierstrass ℘, ℘′, ζ and σ for lattices with real invariants `g₂`, `g₃`.
//!
//! Periods come from the arithmetic–geometric mean of the root differences of
//! `P₃(x) = 4x³ − g₂x − g₃`; function values come from Jacobi θ₁ series on a
//! reduced basis, with exact quasi-periodic bookkeeping for ζ and σ.
//!
//! Conventions: `ω₁ > 0` is the least positive real half-period and `ω₃`
//! the least half-period on the positive imaginary axis. For `D > 0` the
//! lattice is rectangular with generators `2ω₁, 2ω₃`; for `D < 0` it is
//! rhombic with generators `ω₁ ± ω₃`, so `ω₁ ≡ ω₃ (mod Γ)` and
//! `℘(ω₁) = ℘(ω₃)` is the single real root.

mod theta;

use crate::error::{Error, Result};
use crate::poly::{weierstrass_cubic_roots, CubicRoots};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use theta::ThetaEngine;

/// Default pole cutoff relative to `|ω₁|`.
pub const DEFAULT_POLE_CUTOFF: f64 = 1e-8;

pub fn discriminant(g2: f64, g3: f64) -> f64 {
    g2 * g2 * g2 - 27.0 * g3 * g3
}

/// Real lattice invariants and the discriminant `g₂³ − 27g₃²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeInvariants {
    pub g2: f64,
    pub g3: f64,
    pub disc: f64,
}

impl LatticeInvariants {
    pub fn new(g2: f64, g3: f64) -> Self {
        LatticeInvariants {
            g2,
            g3,
            disc: discriminant(g2, g3),
        }
    }

    /// `P₃(x) = 4x³ − g₂x − g₃`.
    pub fn p3(&self, x: f64) -> f64 {
        4.0 * x * x * x - self.g2 * x - self.g3
    }

    pub fn roots(&self) -> CubicRoots {
        weierstrass_cubic_roots(self.g2, self.g3)
    }

    /// Scale of the discriminant terms; `disc` is compared against this.
    pub fn disc_scale(&self) -> f64 {
        (self.g2.abs().powi(3)).max(27.0 * self.g3 * self.g3)
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.roots(), CubicRoots::Degenerate { .. })
    }
}

/// Arithmetic–geometric mean of two positive reals.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        let (an, bn) = ((a + b) / 2.0, (a * b).sqrt());
        if (an - bn).abs() <= 1e-16 * an {
            return an;
        }
        a = an;
        b = bn;
    }
    a
}

/// The period lattice of `(g₂, g₃)` together with its quasi-periods.
#[derive(Debug, Clone)]
pub struct LatticeData {
    pub inv: LatticeInvariants,
    pub omega1: f64,
    pub omega3: Complex64,
    pub eta1: f64,
    pub eta3: Complex64,
    /// Gauss-reduced lattice generators.
    pub generators: [Complex64; 2],
    /// Pole cutoff, relative to `ω₁`.
    pub pole_cutoff: f64,
    engine: ThetaEngine,
}

/// ℘, ℘′ and ζ at one point.
#[derive(Debug, Clone, Copy)]
pub struct Values {
    pub wp: Complex64,
    pub wp_prime: Complex64,
    pub zeta: Complex64,
}

impl LatticeData {
    /// Build the lattice of real invariants with non-zero discriminant.
    pub fn from_invariants(g2: f64, g3: f64) -> Result<Self> {
        let inv = LatticeInvariants::new(g2, g3);
        let (omega1, omega3) = match inv.roots() {
            CubicRoots::Degenerate { .. } => {
                return Err(Error::DegenerateLattice {
                    g2,
                    g3,
                    disc: inv.disc,
                })
            }
            CubicRoots::ThreeReal { e1, e2, e3 } => {
                let w1 = PI / (2.0 * agm((e1 - e3).sqrt(), (e1 - e2).sqrt()));
                let w3 = PI / (2.0 * agm((e1 - e3).sqrt(), (e2 - e3).sqrt()));
                (w1, w3)
            }
            CubicRoots::OneReal { real, .. } => {
                // H = |e_real − e_complex|; AGM of the conjugate square roots.
                let h = (3.0 * real * real - g2 / 4.0).sqrt();
                let w1 = PI / (2.0 * agm(h.sqrt(), 0.5 * (2.0 * h + 3.0 * real).max(0.0).sqrt()));
                let w3 = PI / (2.0 * agm(h.sqrt(), 0.5 * (2.0 * h - 3.0 * real).max(0.0).sqrt()));
                (w1, w3)
            }
        };
        Ok(Self::from_half_periods(inv, omega1, Complex64::new(0.0, omega3)))
    }

    /// Assemble lattice data from stored half-periods, trusting the stored
    /// invariants. Used for fixtures; no consistency check is made.
    pub fn from_half_periods(inv: LatticeInvariants, omega1: f64, omega3: Complex64) -> Self {
        let w1 = Complex64::new(omega1, 0.0);
        let (p1, p2) = if inv.disc > 0.0 {
            (2.0 * w1, 2.0 * omega3)
        } else {
            (w1 + omega3, w1 - omega3)
        };
        let engine = ThetaEngine::new(p1, p2);
        let mut data = LatticeData {
            inv,
            omega1,
            omega3,
            eta1: 0.0,
            eta3: Complex64::new(0.0, 0.0),
            generators: [2.0 * engine.w, 2.0 * engine.w2],
            pole_cutoff: DEFAULT_POLE_CUTOFF,
            engine,
        };
        data.eta1 = data.zeta_unchecked(w1).re;
        data.eta3 = data.zeta_unchecked(omega3);
        data
    }

    pub fn with_pole_cutoff(mut self, cutoff: f64) -> Self {
        self.pole_cutoff = cutoff;
        self
    }

    pub fn is_orbitlike(&self) -> bool {
        self.inv.disc > 0.0
    }

    pub fn roots(&self) -> CubicRoots {
        self.inv.roots()
    }

    /// ℘(ω₃): the smallest real root of P₃ (the only one when D < 0).
    pub fn wp_omega3(&self) -> f64 {
        self.inv.roots().smallest_real()
    }

    /// ℘(ω₁): the largest real root of P₃.
    pub fn wp_omega1(&self) -> f64 {
        self.inv.roots().largest_real()
    }

    /// Split `z` into a representative near the origin and a lattice vector.
    pub fn reduce_to_cell(&self, z: Complex64) -> (Complex64, Complex64) {
        let (zr, a, b) = self.engine.reduce(z);
        (zr, self.engine.lattice_vector(a, b))
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        self.engine.reduce(z).0.norm()
    }

    fn check_pole(&self, z: Complex64, zr: Complex64) -> Result<()> {
        let cutoff = self.pole_cutoff * self.omega1.abs();
        let d = zr.norm();
        if d < cutoff {
            return Err(Error::PoleProximity {
                z: format!("{z}"),
                distance: d,
                cutoff,
            });
        }
        Ok(())
    }

    /// ℘, ℘′ and ζ together.
    pub fn values(&self, z: Complex64) -> Result<Values> {
        let (zr, a, b) = self.engine.reduce(z);
        self.check_pole(z, zr)?;
        let local = self.engine.local(zr);
        Ok(Values {
            wp: local.wp,
            wp_prime: local.wp_prime,
            zeta: local.zeta + self.engine.quasi_period(a, b),
        })
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.values(z)?.wp)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.values(z)?.wp_prime)
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.values(z)?.zeta)
    }

    fn zeta_unchecked(&self, z: Complex64) -> Complex64 {
        let (zr, a, b) = self.engine.reduce(z);
        self.engine.local(zr).zeta + self.engine.quasi_period(a, b)
    }

    /// A logarithm of σ(z) (branch unspecified). Fails only at lattice points.
    pub fn ln_sigma(&self, z: Complex64) -> Result<Complex64> {
        let (zr, a, b) = self.engine.reduce(z);
        if zr.norm() == 0.0 {
            return Err(Error::PoleProximity {
                z: format!("{z}"),
                distance: 0.0,
                cutoff: 0.0,
            });
        }
        let lambda = self.engine.lattice_vector(a, b);
        let eta = self.engine.quasi_period(a, b);
        let sign = if a % 2 == 0 && b % 2 == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, PI)
        };
        Ok(self.engine.local(zr).ln_sigma + eta * (zr + lambda / 2.0) + sign)
    }

    /// σ(z); entire, vanishing on the lattice.
    pub fn sigma(&self, z: Complex64) -> Complex64 {
        match self.ln_sigma(z) {
            Ok(l) => l.exp(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Quasi-period `η(Λ)` with `ζ(z + Λ) = ζ(z) + η(Λ)` for `Λ` a lattice vector.
    pub fn quasi_period_of(&self, lambda: Complex64) -> Complex64 {
        // Express Λ in the reduced basis.
        let t = lambda / (2.0 * self.engine.w);
        let b = (t.im / self.engine.tau.im).round() as i64;
        let a = (t.re - b as f64 * self.engine.tau.re).round() as i64;
        self.engine.quasi_period(a, b)
    }

    /// `η₁ω₃ − η₃ω₁`, equal to `πi/2` for `D > 0` and `πi` for `D < 0`
    /// (where `ω₁, ω₃` span an index-two sublattice).
    pub fn legendre_defect(&self) -> Complex64 {
        let expected = if self.is_orbitlike() { PI / 2.0 } else { PI };
        self.eta1 * self.omega3 - self.eta3 * self.omega1 - Complex64::new(0.0, expected)
    }

    /// Legendre relation on the reduced basis itself: `η_w w' − η_{w'} w − πi/2`.
    pub fn basis_legendre_defect(&self) -> Complex64 {
        self.engine.eta_w * self.engine.w2
            - self.engine.eta_w2 * self.engine.w
            - Complex64::new(0.0, PI / 2.0)
    }
}

/// Free-function form of [`LatticeData::from_invariants`].
pub fn lattice_from_invariants(g2: f64, g3: f64) -> Result<LatticeData> {
    LatticeData::from_invariants(g2, g3)
}
