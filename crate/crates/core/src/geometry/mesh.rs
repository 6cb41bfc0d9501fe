//! Horizontal Hopf lift, torus meshes and their discrete checks, and plain
//! text export.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::{self, Write};

use super::{Model, SpaceFormCurve, TorusKind};
use crate::{Error, Result};

/// Integrator steps per period `2ω₁` of the curvature.
pub const LIFT_STEPS_PER_PERIOD: usize = 4096;

type V4 = [f64; 4];

/// Horizontal lift of a spherical curve to `S³ ⊂ ℂ²`.
#[derive(Debug, Clone)]
pub struct HopfLift {
    pub xs: Vec<f64>,
    pub eta: Vec<[Complex64; 2]>,
    /// `Θ` with `η(L) = e^{iΘ} η(0)`, in `[0, 2π)`.
    pub holonomy: f64,
    /// `1 − |⟨η(0), η(L)⟩|`: zero iff the projection closes.
    pub closure_defect: f64,
    pub length: f64,
}

fn hdot(a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn unit(w: [Complex64; 2]) -> [Complex64; 2] {
    let n = hdot(w, w).re.sqrt();
    [w[0] / n, w[1] / n]
}

/// Connection rate `φ′ = −Im⟨w, w′⟩/|w|²` making `e^{iφ}w/|w|` horizontal.
fn phase_rate(curve: &SpaceFormCurve, x: f64) -> Result<f64> {
    let (w, dw) = curve.homogeneous_jet(x)?;
    Ok(-hdot(w, dw).im / hdot(w, w).re)
}

fn rk4_phase(curve: &SpaceFormCurve, x: f64, phi: f64, h: f64) -> Result<f64> {
    // The rate does not depend on φ, so the classical stages collapse.
    let k1 = phase_rate(curve, x)?;
    let k2 = phase_rate(curve, x + 0.5 * h)?;
    let k4 = phase_rate(curve, x + h)?;
    Ok(phi + h / 6.0 * (k1 + 4.0 * k2 + k4))
}

fn lifted(curve: &SpaceFormCurve, x: f64, phi: f64) -> Result<[Complex64; 2]> {
    let (w, _) = curve.homogeneous_jet(x)?;
    let rot = Complex64::from_polar(1.0, phi);
    let u = unit(w);
    Ok(unit([rot * u[0], rot * u[1]]))
}

/// Horizontal lift at `nodes + 1` uniform points of `[0, L]`.
pub fn hopf_lift_grid(curve: &SpaceFormCurve, nodes: usize) -> Result<HopfLift> {
    if curve.model != Model::RoundSphere {
        return Err(Error::NonSphericalCase);
    }
    let nodes = nodes.max(1);
    let len = curve.length;
    let dx = len / nodes as f64;
    let h_max = curve.kappa_period() / LIFT_STEPS_PER_PERIOD as f64;
    let sub = (dx / h_max).ceil().max(1.0) as usize;
    let h = dx / sub as f64;
    let mut xs = Vec::with_capacity(nodes + 1);
    let mut eta = Vec::with_capacity(nodes + 1);
    let mut phi = 0.0;
    for j in 0..=nodes {
        let x = dx * j as f64;
        xs.push(x);
        eta.push(lifted(curve, x, phi)?);
        if j < nodes {
            for s in 0..sub {
                phi = rk4_phase(curve, x + h * s as f64, phi, h)?;
            }
        }
    }
    let overlap = hdot(eta[0], eta[nodes]);
    Ok(HopfLift {
        xs,
        holonomy: overlap.arg().rem_euclid(2.0 * PI),
        closure_defect: (1.0 - overlap.norm()).abs(),
        eta,
        length: len,
    })
}

/// Horizontal lift at the curve's own samples.
pub fn hopf_lift(curve: &SpaceFormCurve) -> Result<HopfLift> {
    hopf_lift_grid(curve, curve.samples.len().saturating_sub(1))
}

impl HopfLift {
    /// Largest deviation of `|η|` from 1.
    pub fn norm_defect(&self) -> f64 {
        self.eta
            .iter()
            .map(|e| (hdot(*e, *e).re.sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest (sine of the) angle between `π(η)` and the
    /// curve's homogeneous point at the same parameter.
    pub fn projection_defect(&self, curve: &SpaceFormCurve) -> Result<f64> {
        let mut worst = 0.0f64;
        for (x, e) in self.xs.iter().zip(&self.eta) {
            let (w, _) = curve.homogeneous_jet(*x)?;
            // Sine of the Fubini–Study angle between the two lines.
            let u = unit(w);
            worst = worst.max((e[0] * u[1] - e[1] * u[0]).norm());
        }
        Ok(worst)
    }

    /// `|⟨η′, iη⟩|` at node `k`, with `η′` from fourth-order central
    /// differences (step `h`) of the integrated lift.
    pub fn horizontality_defect(&self, curve: &SpaceFormCurve, k: usize, h: f64) -> Result<f64> {
        let x = self.xs[k];
        let e = self.eta[k];
        // Recover φ at the node from η and the unlifted point.
        let (w, _) = curve.homogeneous_jet(x)?;
        let phi = hdot(unit(w), e).arg();
        let steps = 16;
        let step = h / steps as f64;
        let mut at = [[Complex64::new(0.0, 0.0); 2]; 4];
        for (slot, dir) in [(0usize, 1.0f64), (1, -1.0)] {
            let mut p = phi;
            for s in 0..2 * steps {
                p = rk4_phase(curve, x + dir * step * s as f64, p, dir * step)?;
                if s + 1 == steps {
                    at[slot] = lifted(curve, x + dir * h, p)?;
                }
            }
            at[slot + 2] = lifted(curve, x + 2.0 * dir * h, p)?;
        }
        let d = [0, 1].map(|i| {
            (8.0 * (at[0][i] - at[1][i]) - (at[2][i] - at[3][i])) / (12.0 * h)
        });
        Ok(hdot(e, d).im.abs())
    }
}

/// Quad mesh on a `rows × cols` doubly periodic grid.
#[derive(Debug, Clone)]
pub struct TorusMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Profile samples (`n_profile`).
    pub rows: usize,
    /// Fibre / rotation samples (`n_fiber`).
    pub cols: usize,
    pub kind: TorusKind,
}

fn quads(rows: usize, cols: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..rows).flat_map(move |j| {
        (0..cols).map(move |k| {
            let (j1, k1) = ((j + 1) % rows, (k + 1) % cols);
            [j * cols + k, j1 * cols + k, j1 * cols + k1, j * cols + k1]
        })
    })
}

/// `V − E + F` of a quad grid with seams identified.
fn euler_characteristic(rows: usize, cols: usize, vertex_count: usize) -> i64 {
    let mut edges = std::collections::BTreeSet::new();
    let mut faces = 0i64;
    for q in quads(rows, cols) {
        faces += 1;
        for i in 0..4 {
            let (a, b) = (q[i], q[(i + 1) % 4]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    vertex_count as i64 - edges.len() as i64 + faces
}

impl TorusMesh {
    pub fn faces(&self) -> impl Iterator<Item = [usize; 4]> {
        quads(self.rows, self.cols)
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self.rows, self.cols, self.vertices.len())
    }

    /// Wavefront OBJ with 1-based quad faces.
    pub fn write_obj<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in self.faces() {
            writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
        }
        Ok(())
    }
}

/// Profile of a hyperbolic curve in the upper half plane (the disc model is
/// carried over by the Cayley map `w = i(1+z)/(1−z)`).
pub fn revolution_profile(curve: &SpaceFormCurve, nodes: usize) -> Result<Vec<Complex64>> {
    if !matches!(curve.model, Model::PoincareDisc | Model::UpperHalfPlane) {
        return Err(Error::KindMismatch(format!(
            "torus of revolution needs a hyperbolic profile, got {:?}",
            curve.model
        )));
    }
    let nodes = nodes.max(1);
    let one = Complex64::new(1.0, 0.0);
    (0..=nodes)
        .map(|j| {
            let (z, _) = curve.point_jet(curve.length * j as f64 / nodes as f64)?;
            let w = match curve.model {
                Model::PoincareDisc => Complex64::new(0.0, 1.0) * (one + z) / (one - z),
                _ => z,
            };
            if !(w.im > 0.0) || !w.re.is_finite() {
                return Err(Error::ProfileCrossesBoundary { index: j, v: w.im });
            }
            Ok(w)
        })
        .collect()
}

/// Distance between the profile's endpoints relative to its extent.
pub fn profile_closure_defect(profile: &[Complex64]) -> f64 {
    let extent = profile.iter().map(|p| p.norm()).fold(0.0, f64::max);
    (profile[profile.len() - 1] - profile[0]).norm() / extent.max(1e-300)
}

/// Torus of revolution in ℝ³ from a hyperbolic profile: `(u, v cos φ, v sin φ)`.
pub fn torus_of_revolution_mesh(curve: &SpaceFormCurve, rows: usize, cols: usize) -> Result<TorusMesh> {
    let profile = revolution_profile(curve, rows)?;
    let cols = cols.max(3);
    let mut vertices = Vec::with_capacity(rows * cols);
    for p in &profile[..profile.len() - 1] {
        for k in 0..cols {
            let phi = 2.0 * PI * k as f64 / cols as f64;
            vertices.push([p.re, p.im * phi.cos(), p.im * phi.sin()]);
        }
    }
    Ok(TorusMesh {
        vertices,
        rows: profile.len() - 1,
        cols,
        kind: TorusKind::Revolution,
    })
}

/// Hopf torus in the unit `S³ ⊂ ℝ⁴`.
#[derive(Debug, Clone)]
pub struct HopfTorus {
    /// Row `j` is the (holonomy-twisted) fibre over `s_j = jL/rows`.
    pub vertices: Vec<V4>,
    pub rows: usize,
    pub cols: usize,
    pub holonomy: f64,
    pub length: f64,
    pub xs: Vec<f64>,
}

fn to_r4(e: [Complex64; 2]) -> V4 {
    [e[0].re, e[0].im, e[1].re, e[1].im]
}

/// Vertices `e^{i(t − Θs/L)}η(s)`, exactly periodic in both directions.
pub fn hopf_torus_mesh(curve: &SpaceFormCurve, rows: usize, cols: usize) -> Result<HopfTorus> {
    let rows = rows.max(3);
    let cols = cols.max(3);
    let lift = hopf_lift_grid(curve, rows)?;
    let mut vertices = Vec::with_capacity(rows * cols);
    for j in 0..rows {
        let twist = -lift.holonomy * lift.xs[j] / lift.length;
        for k in 0..cols {
            let t = 2.0 * PI * k as f64 / cols as f64;
            let r = Complex64::from_polar(1.0, t + twist);
            let e = lift.eta[j];
            vertices.push(to_r4([r * e[0], r * e[1]]));
        }
    }
    Ok(HopfTorus {
        vertices,
        rows,
        cols,
        holonomy: lift.holonomy,
        length: lift.length,
        xs: lift.xs[..rows].to_vec(),
    })
}

fn dot4(a: &V4, b: &V4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn comb(a: f64, u: &V4, b: f64, v: &V4) -> V4 {
    [0, 1, 2, 3].map(|i| a * u[i] + b * v[i])
}

/// Unit vector orthogonal to three vectors of ℝ⁴ (signed cofactors).
fn cross4(a: &V4, b: &V4, c: &V4) -> V4 {
    let m = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    let n = [-m(1, 2, 3), m(0, 2, 3), -m(0, 1, 3), m(0, 1, 2)];
    let len = dot4(&n, &n).sqrt();
    n.map(|x| x / len)
}

/// Per-vertex first/second fundamental form data, by periodic central
/// differences (`u` along the fibre, `v` along the profile).
struct Forms {
    e: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    mean: Vec<f64>,
    hu: f64,
    hv: f64,
}

impl HopfTorus {
    fn at(&self, j: isize, k: isize) -> &V4 {
        let (r, c) = (self.rows as isize, self.cols as isize);
        &self.vertices[(j.rem_euclid(r) * c + k.rem_euclid(c)) as usize]
    }

    fn forms(&self) -> Forms {
        let hu = 2.0 * PI / self.cols as f64;
        let hv = self.length / self.rows as f64;
        let n = self.vertices.len();
        let (mut e, mut f, mut g, mut mean) =
            (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for j in 0..self.rows as isize {
            for k in 0..self.cols as isize {
                let p = self.at(j, k);
                // Fourth-order central stencils on the periodic grid.
                let d1 = |a: &V4, b: &V4, c: &V4, d: &V4, h: f64| {
                    [0, 1, 2, 3].map(|i| (-a[i] + 8.0 * b[i] - 8.0 * c[i] + d[i]) / (12.0 * h))
                };
                let d2 = |a: &V4, b: &V4, c: &V4, d: &V4, h: f64| {
                    [0, 1, 2, 3].map(|i| {
                        (-a[i] + 16.0 * b[i] - 30.0 * p[i] + 16.0 * c[i] - d[i]) / (12.0 * h * h)
                    })
                };
                let u = |o: isize| self.at(j, k + o);
                let v = |o: isize| self.at(j + o, k);
                let fu = d1(u(2), u(1), u(-1), u(-2), hu);
                let fv = d1(v(2), v(1), v(-1), v(-2), hv);
                let fuu = d2(u(2), u(1), u(-1), u(-2), hu);
                let fvv = d2(v(2), v(1), v(-1), v(-2), hv);
                let fu_row = |o: isize| {
                    let r = |q: isize| self.at(j + o, k + q);
                    d1(r(2), r(1), r(-1), r(-2), hu)
                };
                let fuv = d1(&fu_row(2), &fu_row(1), &fu_row(-1), &fu_row(-2), hv);
                let nrm = cross4(p, &fu, &fv);
                let (ee, ff, gg) = (dot4(&fu, &fu), dot4(&fu, &fv), dot4(&fv, &fv));
                let (l2, m2, n2) = (dot4(&fuu, &nrm), dot4(&fuv, &nrm), dot4(&fvv, &nrm));
                let idx = (j as usize) * self.cols + k as usize;
                e[idx] = ee;
                f[idx] = ff;
                g[idx] = gg;
                mean[idx] = (l2 * gg - 2.0 * m2 * ff + n2 * ee) / (2.0 * (ee * gg - ff * ff));
            }
        }
        Forms { e, f, g, mean, hu, hv }
    }

    /// Largest |K| of the induced metric (Brioschi formula on the grid).
    pub fn max_gauss_curvature(&self) -> f64 {
        let fm = self.forms();
        let (r, c) = (self.rows as isize, self.cols as isize);
        let at = |a: &Vec<f64>, j: isize, k: isize| a[(j.rem_euclid(r) * c + k.rem_euclid(c)) as usize];
        let du = |a: &Vec<f64>, j, k| (at(a, j, k + 1) - at(a, j, k - 1)) / (2.0 * fm.hu);
        let dv = |a: &Vec<f64>, j, k| (at(a, j + 1, k) - at(a, j - 1, k)) / (2.0 * fm.hv);
        let duu = |a: &Vec<f64>, j, k| {
            (at(a, j, k + 1) - 2.0 * at(a, j, k) + at(a, j, k - 1)) / (fm.hu * fm.hu)
        };
        let dvv = |a: &Vec<f64>, j, k| {
            (at(a, j + 1, k) - 2.0 * at(a, j, k) + at(a, j - 1, k)) / (fm.hv * fm.hv)
        };
        let duv = |a: &Vec<f64>, j, k| {
            (at(a, j + 1, k + 1) - at(a, j + 1, k - 1) - at(a, j - 1, k + 1)
                + at(a, j - 1, k - 1))
                / (4.0 * fm.hu * fm.hv)
        };
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let mut worst = 0.0f64;
        for j in 0..r {
            for k in 0..c {
                let (e, f, g) = (at(&fm.e, j, k), at(&fm.f, j, k), at(&fm.g, j, k));
                let m1 = [
                    [
                        -0.5 * dvv(&fm.e, j, k) + duv(&fm.f, j, k) - 0.5 * duu(&fm.g, j, k),
                        0.5 * du(&fm.e, j, k),
                        du(&fm.f, j, k) - 0.5 * dv(&fm.e, j, k),
                    ],
                    [dv(&fm.f, j, k) - 0.5 * du(&fm.g, j, k), e, f],
                    [0.5 * dv(&fm.g, j, k), f, g],
                ];
                let m2 = [
                    [0.0, 0.5 * dv(&fm.e, j, k), 0.5 * du(&fm.g, j, k)],
                    [0.5 * dv(&fm.e, j, k), e, f],
                    [0.5 * du(&fm.g, j, k), f, g],
                ];
                let k_gauss = (det3(m1) - det3(m2)) / (e * g - f * f).powi(2);
                worst = worst.max(k_gauss.abs());
            }
        }
        worst
    }

    /// Mean curvature at every vertex (row-major).
    pub fn mean_curvature(&self) -> Vec<f64> {
        self.forms().mean
    }

    /// Largest `|H − σκ(s)/√G|` over vertices, with the orientation sign
    /// `σ = ±1` chosen globally.
    pub fn mean_curvature_gap(&self, curve: &SpaceFormCurve) -> Result<f64> {
        let mean = self.mean_curvature();
        let scale = curve.g.sqrt();
        let kappas: Vec<f64> = self
            .xs
            .iter()
            .map(|x| curve.kappa(*x).map(|k| k / scale))
            .collect::<Result<_>>()?;
        let gap = |sign: f64| {
            let mut worst = 0.0f64;
            for j in 0..self.rows {
                for k in 0..self.cols {
                    worst = worst.max((mean[j * self.cols + k] - sign * kappas[j]).abs());
                }
            }
            worst
        };
        Ok(gap(1.0).min(gap(-1.0)))
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self.rows, self.cols, self.vertices.len())
    }

    /// Largest deviation of a vertex norm from 1.
    pub fn norm_defect(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (dot4(v, v).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn faces(&self) -> impl Iterator<Item = [usize; 4]> {
        quads(self.rows, self.cols)
    }

    /// Stereographic projection to ℝ³ from a pole far from the surface.
    pub fn stereographic(&self) -> TorusMesh {
        let pole = self.pick_pole();
        let basis = complement_basis(&pole);
        let vertices = self
            .vertices
            .iter()
            .map(|x| {
                let d = 1.0 - dot4(x, &pole);
                [0, 1, 2].map(|i| dot4(x, &basis[i]) / d)
            })
            .collect();
        TorusMesh {
            vertices,
            rows: self.rows,
            cols: self.cols,
            kind: TorusKind::Hopf,
        }
    }

    fn pick_pole(&self) -> V4 {
        let mut candidates: Vec<V4> = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut v = [0.0; 4];
                v[i] = s;
                candidates.push(v);
            }
        }
        for bits in 0..16 {
            candidates.push([0, 1, 2, 3].map(|i| if bits >> i & 1 == 1 { -0.5 } else { 0.5 }));
        }
        let mut best = (f64::NEG_INFINITY, candidates[0]);
        for p in candidates {
            let closest = self
                .vertices
                .iter()
                .map(|x| 1.0 - dot4(x, &p))
                .fold(f64::INFINITY, f64::min);
            if closest > best.0 {
                best = (closest, p);
            }
        }
        best.1
    }
}

/// Orthonormal basis of the complement of a unit vector.
fn complement_basis(p: &V4) -> [V4; 3] {
    let mut out: Vec<V4> = Vec::with_capacity(3);
    for i in 0..4 {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        let mut w = comb(1.0, &v, -dot4(&v, p), p);
        for b in &out {
            w = comb(1.0, &w, -dot4(&w, b), b);
        }
        let n = dot4(&w, &w).sqrt();
        if n > 1e-6 && out.len() < 3 {
            out.push(w.map(|x| x / n));
        }
    }
    [out[0], out[1], out[2]]
}

/// `x,re,im,kappa` rows, one per sample.
pub fn write_curve_csv<W: Write>(curve: &SpaceFormCurve, out: &mut W) -> io::Result<()> {
    writeln!(out, "x,re,im,kappa")?;
    for s in &curve.samples {
        writeln!(out, "{},{},{},{}", s.x, s.point.re, s.point.im, s.kappa)?;
    }
    Ok(())
}
