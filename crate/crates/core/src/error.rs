use thiserror::Error;

/// Errors raised by the elliptic kernel, the solvers and the geometry layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate lattice: discriminant {disc:e} is zero (g2 = {g2}, g3 = {g3})")]
    DegenerateLattice { g2: f64, g3: f64, disc: f64 },

    #[error("argument {z} lies within {distance:e} of a lattice point (cutoff {cutoff:e})")]
    PoleProximity { z: String, distance: f64, cutoff: f64 },

    #[error("initial value {kappa0} is not a root of P4 (residual {residual:e})")]
    InvalidInitialValue { kappa0: f64, residual: f64 },

    #[error("no point on the segment attains the target value {target}")]
    NoSolutionOnSegment { target: f64 },

    #[error("x0 = {x0} lies in the forbidden set 1/2 Lattice + R")]
    InvalidX0 { x0: String },

    #[error("closing target {target} is not bracketed on the admissible segment")]
    TargetOutOfRange { target: f64 },

    #[error("wrong discriminant sign for this closing case (disc = {disc:e})")]
    WrongDiscriminant { disc: f64 },

    #[error("E = {e} is a branch value of the Weierstrass function (P3(E) = {p3:e})")]
    BranchPoint { e: f64, p3: f64 },

    #[error("affine chart is singular at x = {x}")]
    ChartSingularity { x: f64 },

    #[error("integration failed: {0}")]
    IntegrationFailure(String),

    #[error("profile curve leaves the upper half plane (v = {v:e} at sample {index})")]
    ProfileCrossesBoundary { index: usize, v: f64 },

    #[error("torus kind does not match the closing case: {0}")]
    KindMismatch(String),

    #[error("enclosed area is only defined for spherical curves")]
    NonSphericalCase,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
