use elastica::check::*;
use elastica::weierstrass::LatticeData;

#[test]
fn lemniscatic_default_instance_is_green() {
    let cfg = CheckConfig::default();
    println!("seed = {}", cfg.seed);
    let results = run_checks(&cfg);
    for r in &results {
        println!("{:?} {} {:e} <= {:e}", r.status, r.name, r.residual, r.tol);
        assert!(matches!(r.status, Status::Pass), "{} did not pass", r.name);
    }
    assert!(all_passed(&results));
}

#[test]
fn corrupted_g3_fails_the_ode_check() {
    let mut l = LatticeData::from_invariants(4.0, 0.0).unwrap();
    l.inv.g3 += 1e-3;
    let results = run_checks_on(&l, &CheckConfig::default());
    let ode = results.iter().find(|r| r.name == "wp_ode").unwrap();
    assert_eq!(ode.status, Status::Fail);
    assert!(!all_passed(&results));
}

#[test]
fn degenerate_instance_is_skipped() {
    let cfg = CheckConfig {
        g2: 3.0,
        g3: 1.0,
        ..Default::default()
    };
    let results = run_checks(&cfg);
    assert!(!results.is_empty());
    for r in &results {
        assert_eq!(r.status, Status::Skipped("degenerate".into()), "{}", r.name);
    }
    assert!(all_passed(&results));
}

#[test]
fn tolerance_overrides_apply() {
    let mut cfg = CheckConfig::default();
    cfg.tolerances.insert("wp_ode".into(), 0.0);
    cfg.tolerances.insert("unit_speed".into(), 0.5);
    assert_eq!(cfg.tol("wp_ode"), 0.0);
    assert_eq!(cfg.tol("unit_speed[hyp-orbit]"), 0.5);
    assert_eq!(cfg.tol("legendre"), 1e-10);
}

#[test]
fn same_seed_same_results() {
    let cfg = CheckConfig {
        g2: 1.0,
        g3: 1.0,
        seed: 7,
        ..Default::default()
    };
    let a = run_checks(&cfg);
    let b = run_checks(&cfg);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn omega1_oracle_matches_on_wavelike_lattice() {
    let l = LatticeData::from_invariants(0.0, -4.0).unwrap();
    let q = omega1_by_quadrature(0.0, l.wp_omega1());
    assert!((q - l.omega1).abs() <= 1e-10 * q);
}
