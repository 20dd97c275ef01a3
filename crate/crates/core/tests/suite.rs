use annulus_energy::verification::{check_names, run_suite, InjectedFault, SuiteConfig};

#[test]
fn default_suite_passes() {
    let report = run_suite(&SuiteConfig::default()).unwrap();
    assert!(report.all_passed(), "{report}");
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, check_names());
    assert!(report.checks.iter().all(|c| !c.anchor.is_empty()));
}

#[test]
fn loose_tolerance_keeps_strictness_margins() {
    let mut cfg = SuiteConfig::default();
    cfg.quadrature.rel_tol = 1e-4;
    let report = run_suite(&cfg).unwrap();
    for name in ["quasiradial-strictness", "radial-gap", "radial-local-optimality"] {
        let c = report.check(name).unwrap();
        assert!(c.passed, "{c:?}");
    }
}

#[test]
fn seed_changes_keep_pass_pattern() {
    let a = run_suite(&SuiteConfig::default()).unwrap();
    let b = run_suite(&SuiteConfig {
        seed: 99,
        ..SuiteConfig::default()
    })
    .unwrap();
    let pattern = |r: &annulus_energy::verification::SuiteReport| r.checks.iter().map(|c| c.passed).collect::<Vec<_>>();
    assert_eq!(pattern(&a), pattern(&b));
    assert_eq!(b.seed, 99);
}

#[test]
fn reruns_are_bit_identical() {
    let a = serde_json::to_string(&run_suite(&SuiteConfig::default()).unwrap()).unwrap();
    let b = serde_json::to_string(&run_suite(&SuiteConfig::default()).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn injected_fault_is_caught() {
    let cfg = SuiteConfig {
        fault: Some(InjectedFault::ScaleBound(1.001)),
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert!(!report.all_passed());
    let failed: Vec<&str> = report.failures().map(|c| c.anchor.as_str()).collect();
    assert!(failed.contains(&"combined-energy-equality-case"));
    assert!(failed.contains(&"three-dimensional-attainment"));
}

#[test]
fn other_annuli_pass() {
    let cfg = SuiteConfig {
        r: 0.5,
        big_r: 3.0,
        r_star: 2.0,
        big_r_star: 5.0,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert!(report.all_passed(), "{report}");
}

#[test]
fn invalid_config_aborts() {
    let cfg = SuiteConfig {
        r: 3.0,
        ..SuiteConfig::default()
    };
    assert!(run_suite(&cfg).is_err());
}
