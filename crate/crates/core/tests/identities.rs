use dipesim_core::identities::{
    check_likelihood_ratio, likelihood_ratio_closed_form, CheckKind, CheckParams, CheckRegistry,
};
use dipesim_core::StreamRng;

#[test]
fn exact_suite_passes_except_displayed_bound() {
    let registry = CheckRegistry::with_defaults();
    let reports = registry.run_suite(Some(CheckKind::Exact), 1).unwrap();
    assert!(reports.len() > 150);
    for r in reports.iter().filter(|r| r.name != "mp_bound_displayed") {
        assert!(r.passed, "{r:?}");
    }
    let displayed_failures = reports.iter().filter(|r| r.name == "mp_bound_displayed" && !r.passed).count();
    assert!(displayed_failures > 0);
}

#[test]
fn displayed_bound_fails_at_smallest_instance() {
    let registry = CheckRegistry::with_defaults();
    let p: CheckParams = "d=2;a=1;b=1;input=basis".parse().unwrap();
    let derived = registry.get("mp_bound").unwrap().run(&p, 0).unwrap();
    let displayed = registry.get("mp_bound_displayed").unwrap().run(&p, 0).unwrap();
    assert!(derived.passed && derived.residual < 0.0);
    assert!(!displayed.passed);
    // min eigenvalue 1/6 against e^{-1/2}/2.
    assert!((displayed.residual - ((-0.5f64).exp() / 2.0 - 1.0 / 6.0)).abs() < 1e-12);
}

#[test]
fn monte_carlo_suite_passes_at_fixed_seed() {
    let registry = CheckRegistry::with_defaults();
    for r in registry.run_suite(Some(CheckKind::MonteCarlo), 2).unwrap() {
        assert!(r.passed, "{r:?}");
        assert!(r.samples > 0);
    }
}

#[test]
fn likelihood_ratio_reference_values() {
    let eq = likelihood_ratio_closed_form(4, 0.25, &[3, 3]).unwrap();
    assert_eq!(format!("{eq:.5}"), "1.17647");
    let mut rng = StreamRng::new(3, 0);
    let r = check_likelihood_ratio(4, 4, &[3, 3], 100_000, &mut rng).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn every_check_has_a_nonempty_grid_and_description() {
    for check in CheckRegistry::with_defaults().iter() {
        assert!(!check.grid().is_empty(), "{}", check.name());
        assert!(!check.description().is_empty());
    }
}
