use hypercurv::cli::{run_audit, run_identities, AuditConfig, AuditFamily, IdentityConfig, SignPattern};
use hypercurv::grw::Orientation;

#[test]
fn slice_audit_flags() {
    for o in [Orientation::Same, Orientation::Opposite] {
        let cfg = AuditConfig {
            r: 2,
            samples: 6,
            orientation: Some(o),
            ..AuditConfig::new(AuditFamily::Slices)
        };
        let rep = run_audit(&cfg).unwrap();
        assert_eq!(rep.rejected, 0);
        for v in &rep.verdicts {
            assert!(v.over_slice && v.nonnegative_sectional && v.c_bounds);
            assert_eq!(v.scalar_below_model, Some(true));
            assert_eq!(v.completeness, "unauditable");
            assert_eq!(v.orientation, o);
            // H_2 = λ_1 λ_2 = 1 in both orientations.
            assert_eq!(v.hr_sign, SignPattern::Positive);
        }
        assert!(rep.passed);
    }
}

#[test]
fn caps_audit_is_not_vacuous() {
    let rep = run_audit(&AuditConfig {
        samples: 12,
        seed: 4,
        ..AuditConfig::new(AuditFamily::Caps)
    })
    .unwrap();
    assert!(rep.audited_nodes > 0);
    assert_eq!(rep.key_failures, 0);
}

#[test]
fn audit_rejects_bad_config() {
    let mut cfg = AuditConfig::new(AuditFamily::Bowls);
    cfg.r = 3;
    assert!(run_audit(&cfg).is_err());
    cfg.r = 1;
    cfg.beta = 1.0;
    assert!(run_audit(&cfg).is_err());
    assert!("cones".parse::<AuditFamily>().is_err());
    assert_eq!("trig".parse::<AuditFamily>().unwrap(), AuditFamily::Trig);
}

#[test]
fn identities_detect_fault() {
    let cfg = IdentityConfig {
        matrices: 100,
        spectra: 300,
        ..IdentityConfig::default()
    };
    let ok = run_identities(&cfg).unwrap();
    assert!(ok.passed, "{:?}", ok.suites);
    let bad = run_identities(&IdentityConfig { inject_fault: true, ..cfg }).unwrap();
    assert!(!bad.passed);
    assert!(bad.suites.iter().filter(|s| !s.passed).all(|s| s.name == "trace_identities"));
}
