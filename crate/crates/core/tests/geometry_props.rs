use elastica::closing::{self, family_of, CaseTag, ClosingSolution};
use elastica::curvegen::CurveFamily;
use elastica::geometry::*;
use elastica::weierstrass::LatticeData;
use elastica::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn lattice(g2: f64, g3: f64) -> LatticeData {
    LatticeData::from_invariants(g2, g3).unwrap()
}

fn solved(g2: f64, g3: f64, case: CaseTag, m: i64, n: i64) -> (LatticeData, ClosingSolution, CurveFamily) {
    let l = lattice(g2, g3);
    let sol = closing::solve(&l, case, m, n).unwrap().unwrap();
    let fam = family_of(&sol, &l).unwrap();
    (l, sol, fam)
}

fn cases() -> Vec<(LatticeData, ClosingSolution, CurveFamily)> {
    vec![
        solved(4.0, 0.0, CaseTag::Sphere, 1, 2),
        solved(1.0, 1.0, CaseTag::Sphere, 2, 3),
        solved(4.0, 0.0, CaseTag::HyperbolicOrbitlike, 1, 2),
        solved(0.0, -4.0, CaseTag::HyperbolicWavelike, 0, 1),
    ]
}

#[test]
fn unit_speed_at_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (_, sol, fam) in cases() {
        let c = normalize_to_spaceform(&fam, &sol, 128).unwrap();
        for _ in 0..20 {
            let x = rng.gen_range(0.0..c.length);
            let s = c.speed(x).unwrap();
            assert!((s - 1.0).abs() <= 1e-6, "{:?}: speed {s}", sol.case);
        }
    }
}

#[test]
fn model_length_equals_parameter_length() {
    for (l, sol, fam) in cases() {
        let c = normalize_to_spaceform(&fam, &sol, 128).unwrap();
        let len = periodic_trapezoid(|x| c.speed(x), c.length, 2048).unwrap();
        assert!((len - sol.length(&l)).abs() <= 1e-5 * len);
    }
}

#[test]
fn model_follows_case() {
    let expect = [Model::RoundSphere, Model::RoundSphere, Model::PoincareDisc, Model::UpperHalfPlane];
    for ((_, sol, fam), model) in cases().into_iter().zip(expect) {
        let c = normalize_to_spaceform(&fam, &sol, 16).unwrap();
        assert_eq!(c.model, model);
        assert_eq!(c.g > 0.0, model == Model::RoundSphere);
    }
}

#[test]
fn hopf_willmore_formula_matches_quadrature() {
    for (l, sol, fam) in cases().into_iter().take(2) {
        let w = willmore_energy(&sol, &l, TorusKind::Hopf).unwrap();
        let q = willmore_by_quadrature(&fam, &sol, TorusKind::Hopf, 1024).unwrap();
        assert!((w - q).abs() <= 1e-5 * w, "{w} vs {q}");
        assert!(energy_identity_defect(&fam, sol.n, 1024).unwrap() <= 1e-5);
    }
}

/// `∫H² dA` of the Euclidean surface of revolution of a profile `(u, v)`,
/// from principal curvatures computed by finite differences.
fn euclidean_willmore(c: &SpaceFormCurve) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let to_uhp = |x: f64| -> (Complex64, Complex64) {
        let (z, dz) = c.point_jet(x).unwrap();
        match c.model {
            Model::PoincareDisc => {
                let w = Complex64::new(0.0, 1.0) * (one + z) / (one - z);
                (w, Complex64::new(0.0, 2.0) * dz / ((one - z) * (one - z)))
            }
            _ => (z, dz),
        }
    };
    let nodes = 4096;
    let h = c.length / nodes as f64;
    let eps = 1e-5;
    let mut acc = 0.0;
    for k in 0..nodes {
        let x = h * k as f64;
        let (w, d1) = to_uhp(x);
        let d2 = (to_uhp(x + eps).1 - to_uhp(x - eps).1) / (2.0 * eps);
        let speed = d1.norm();
        let k1 = (d1.re * d2.im - d2.re * d1.im) / speed.powi(3);
        let k2 = -d1.re / (w.im * speed);
        let mean = 0.5 * (k1 + k2);
        acc += mean * mean * 2.0 * PI * w.im * speed;
    }
    acc * h
}

#[test]
fn revolution_willmore_matches_euclidean_oracle() {
    for (l, sol, fam) in cases().into_iter().skip(2) {
        let w = willmore_energy(&sol, &l, TorusKind::Revolution).unwrap();
        let q = willmore_by_quadrature(&fam, &sol, TorusKind::Revolution, 1024).unwrap();
        assert!((w - q).abs() <= 1e-5 * w, "{w} vs {q}");
        let c = normalize_to_spaceform(&fam, &sol, 64).unwrap();
        let e = euclidean_willmore(&c);
        assert!((w - e).abs() <= 1e-5 * w, "{:?}: {w} vs Euclidean {e}", sol.case);
    }
}

#[test]
fn conformal_class_shapes() {
    for (l, sol, fam) in cases() {
        if sol.g > 0.0 {
            let a = enclosed_area(&sol, &fam).unwrap();
            let (z1, z2) = conformal_class(&sol, &l, TorusKind::Hopf, a).unwrap();
            assert_eq!(z1, Complex64::new(2.0 * PI, 0.0));
            assert!((z2.im - 0.5 * sol.g.sqrt() * 2.0 * sol.n as f64 * l.omega1).abs() < 1e-12);
            let mut doubled = sol;
            doubled.n *= 2;
            let (_, z2d) = conformal_class(&doubled, &l, TorusKind::Hopf, a).unwrap();
            assert!((z2d.im - 2.0 * z2.im).abs() <= 1e-12 * z2.im);
        } else {
            let (_, z2) = conformal_class(&sol, &l, TorusKind::Revolution, 0.0).unwrap();
            assert_eq!(z2.re, 0.0);
            assert!(z2.im > 0.0);
        }
    }
}

/// `½GA` as the integral of the 1-form `(x dy − y dx)/(1 + |z|²)`, whose
/// differential is `½G` times the area form `4/(G(1+|z|²)²)`. The chart is
/// first rotated (an isometry) so the curve stays away from `∞`.
fn chart_half_ga(c: &SpaceFormCurve) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let rotations = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
        [Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    let rotate = |[a, b]: [Complex64; 2], w: [Complex64; 2]| {
        [a * w[0] + b * w[1], -b.conj() * w[0] + a.conj() * w[1]]
    };
    let nodes = 8192;
    let radius = |u: [Complex64; 2]| {
        (0..nodes)
            .map(|k| {
                let (w, _) = c.homogeneous_jet(c.length * k as f64 / nodes as f64).unwrap();
                let v = rotate(u, w);
                (v[0] / v[1]).norm()
            })
            .fold(0.0, f64::max)
    };
    let best = rotations
        .into_iter()
        .min_by(|a, b| radius(*a).total_cmp(&radius(*b)))
        .unwrap();
    periodic_trapezoid(
        |x| {
            let (w, dw) = c.homogeneous_jet(x)?;
            let (v, dv) = (rotate(best, w), rotate(best, dw));
            let z = v[0] / v[1];
            let dz = (dv[0] * v[1] - v[0] * dv[1]) / (v[1] * v[1]);
            Ok((z.re * dz.im - z.im * dz.re) / (1.0 + z.norm_sqr()))
        },
        c.length,
        nodes,
    )
    .unwrap()
}

#[test]
fn area_agrees_with_gauss_bonnet_and_chart_integral() {
    for (l, sol, _) in cases().into_iter().take(2) {
        for fam in closing::isospectral_sweep(&sol, &l, 5).unwrap() {
            let mut member = sol;
            member.g = fam.params.g;
            if member.g <= 0.0 {
                continue;
            }
            let closed = half_ga_closed_form(&member, &fam).unwrap();
            let gb = half_ga_gauss_bonnet(&member, &fam, 1024).unwrap();
            assert!(angle_gap(closed, gb) <= 1e-5, "{closed} vs {gb}");
            let c = normalize_to_spaceform(&fam, &member, 64).unwrap();
            let chart = chart_half_ga(&c);
            assert!(angle_gap(closed, chart) <= 1e-5, "{closed} vs chart {chart}");
            let lift = hopf_lift(&c).unwrap();
            assert!(angle_gap(-lift.holonomy, closed) <= 1e-5);
        }
    }
}

#[test]
fn reversing_x0_reverses_area() {
    let (l, sol, fam) = solved(1.0, 1.0, CaseTag::Sphere, 2, 3);
    let member = CurveFamily::new(l.clone(), fam.x0 * 0.6, sol.rho).unwrap();
    let mirror = CurveFamily::new(l, -member.x0, sol.rho).unwrap();
    assert!((mirror.kappa0 + member.kappa0).abs() < 1e-9);
    let a = half_ga_closed_form(&sol, &member).unwrap();
    let b = half_ga_closed_form(&sol, &mirror).unwrap();
    assert!(angle_gap(a, -b) < 1e-9, "{a} vs {b}");
}

#[test]
fn great_circle_degenerate_path() {
    let g = 2.0;
    let c = constant_curvature_circle(0.0, g, 128).unwrap();
    assert!((c.length - 2.0 * PI / g.sqrt()).abs() < 1e-12);
    let w = willmore_constant_curvature(0.0, g).unwrap();
    assert!((w - 2.0 * PI * PI).abs() < 1e-12);
    let direct = PI / g.sqrt() * g * c.length;
    assert!((w - direct).abs() < 1e-12);
    assert!((circle_enclosed_area(0.0, g).unwrap() - 2.0 * PI / g).abs() < 1e-12);
    let lift = hopf_lift(&c).unwrap();
    let half = 0.5 * g * circle_enclosed_area(0.0, g).unwrap();
    assert!(angle_gap(-lift.holonomy, half) < 1e-9);
}

#[test]
fn small_circle_holonomy_matches_cap_area() {
    for (k, g) in [(0.8, 1.0), (-0.4, 3.0), (2.5, 0.5)] {
        let c = constant_curvature_circle(k, g, 256).unwrap();
        let lift = hopf_lift(&c).unwrap();
        let half = 0.5 * g * circle_enclosed_area(k, g).unwrap();
        assert!(angle_gap(-lift.holonomy, half) < 1e-8, "κ={k}: {} vs {half}", lift.holonomy);
    }
}

#[test]
fn hopf_lift_properties() {
    let (_, sol, fam) = solved(4.0, 0.0, CaseTag::Sphere, 1, 2);
    let c = normalize_to_spaceform(&fam, &sol, 256).unwrap();
    let lift = hopf_lift(&c).unwrap();
    assert!(lift.norm_defect() <= 1e-9);
    assert!(lift.projection_defect(&c).unwrap() <= 1e-7);
    assert!(lift.closure_defect <= 1e-9);
    for k in [3, 100, 400] {
        assert!(lift.horizontality_defect(&c, k, 1e-3).unwrap() <= 1e-7);
    }
    let hyp = solved(4.0, 0.0, CaseTag::HyperbolicOrbitlike, 1, 2);
    let hc = normalize_to_spaceform(&hyp.2, &hyp.1, 16).unwrap();
    assert!(matches!(hopf_lift(&hc), Err(Error::NonSphericalCase)));
}

#[test]
fn hopf_mesh_is_a_flat_torus() {
    let (_, sol, fam) = solved(1.0, 1.0, CaseTag::Sphere, 2, 3);
    let c = normalize_to_spaceform(&fam, &sol, 64).unwrap();
    let mesh = hopf_torus_mesh(&c, 512 * 3, 128).unwrap();
    assert_eq!(mesh.vertices.len(), 512 * 3 * 128);
    assert!(mesh.norm_defect() <= 1e-9);
    assert_eq!(mesh.euler_characteristic(), 0);
    assert!(mesh.max_gauss_curvature() <= 1e-3);
    assert!(mesh.mean_curvature_gap(&c).unwrap() <= 1e-3);
    let flat = mesh.stereographic();
    assert!(flat.vertices.iter().flatten().all(|v| v.is_finite()));
    assert_eq!(flat.kind, TorusKind::Hopf);
}

#[test]
fn tiny_meshes_close_up() {
    let (_, sol, fam) = solved(4.0, 0.0, CaseTag::Sphere, 1, 2);
    let c = normalize_to_spaceform(&fam, &sol, 16).unwrap();
    let mesh = hopf_torus_mesh(&c, 4, 4).unwrap().stereographic();
    assert_eq!(mesh.vertices.len(), 16);
    assert_eq!(mesh.faces().count(), 16);
    assert_eq!(mesh.euler_characteristic(), 0);
    let mut obj = Vec::new();
    mesh.write_obj(&mut obj).unwrap();
    let text = String::from_utf8(obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 16);
    for line in text.lines().filter(|l| l.starts_with("f ")) {
        for idx in line[2..].split(' ') {
            let i: usize = idx.parse().unwrap();
            assert!((1..=16).contains(&i));
        }
    }
}

#[test]
fn revolution_meshes() {
    for (_, sol, fam) in cases().into_iter().skip(2) {
        let c = normalize_to_spaceform(&fam, &sol, 64).unwrap();
        let profile = revolution_profile(&c, 256).unwrap();
        assert!(profile_closure_defect(&profile) <= 1e-6);
        let mesh = torus_of_revolution_mesh(&c, 256, 32).unwrap();
        assert_eq!(mesh.vertices.len(), 256 * 32);
        assert_eq!(mesh.euler_characteristic(), 0);
        assert_eq!(mesh.kind, TorusKind::Revolution);
    }
    // Standard torus from a hyperbolic circle.
    let circle = constant_curvature_circle(3.0, -1.0, 64).unwrap();
    let mesh = torus_of_revolution_mesh(&circle, 64, 16).unwrap();
    assert_eq!(mesh.euler_characteristic(), 0);
    let sphere = solved(4.0, 0.0, CaseTag::Sphere, 1, 2);
    let sc = normalize_to_spaceform(&sphere.2, &sphere.1, 16).unwrap();
    assert!(matches!(torus_of_revolution_mesh(&sc, 8, 8), Err(Error::KindMismatch(_))));
}

#[test]
fn cmc_verdicts_match_cubic_sign() {
    let l = lattice(4.0, 0.0);
    for k in 0..200 {
        let e = -2.0 + 5.0 * k as f64 / 199.0;
        let p3 = 4.0 * e * e * e - 4.0 * e;
        match cmc_classify_sympoint(&l, e) {
            Ok(CmcType::S3) => assert!(p3 < 0.0),
            Ok(CmcType::H3LargeH) => assert!(p3 > 0.0),
            Ok(CmcType::H3SmallH) => panic!("orbitlike lattice"),
            Err(Error::BranchPoint { .. }) => assert!(p3.abs() < 1e-9),
            Err(e) => panic!("{e}"),
        }
    }
    let (wl, wsol, _) = solved(0.0, -4.0, CaseTag::HyperbolicWavelike, 0, 1);
    assert_eq!(cmc_classify(&wsol, &wl).unwrap(), CmcType::H3SmallH);
}

#[test]
fn reports_carry_both_energies() {
    for (_, sol, fam) in cases() {
        let kind = if sol.g > 0.0 { TorusKind::Hopf } else { TorusKind::Revolution };
        let r = torus_report(&sol, &fam, kind, 512).unwrap();
        assert!(r.willmore_rel_gap <= 1e-5);
        assert!(r.z2.im > 0.0);
        assert_eq!(r.cmc.is_some(), kind == TorusKind::Revolution);
        if kind == TorusKind::Hopf {
            assert!(r.area_gap <= 1e-5);
            assert!(r.area_a >= 0.0 && r.area_a < 4.0 * PI / sol.g);
        }
    }
}

#[test]
fn curve_csv_has_header_and_rows() {
    let (_, sol, fam) = solved(4.0, 0.0, CaseTag::Sphere, 1, 2);
    let c = normalize_to_spaceform(&fam, &sol, 8).unwrap();
    let mut out = Vec::new();
    write_curve_csv(&c, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re,im,kappa"));
    assert_eq!(lines.count(), 17);
}
