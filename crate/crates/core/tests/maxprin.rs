use hypercurv::maxprin::*;
use hypercurv::symfunc::SymMatrix;
use hypercurv::Error;

fn flat2(p: [f64; 2]) -> ModelManifold {
    ModelManifold::flat(2, p.to_vec()).unwrap()
}

fn inverse_quadratic(model: &ModelManifold) -> TestFunction {
    TestFunction::new(FunctionFamily::InverseQuadratic { amplitude: 1.0 }, model).unwrap()
}

#[test]
fn flat_comparison_example() {
    let v = comparison_functions(2.0, 0.0).unwrap();
    assert_eq!(v.s, 2.0);
    assert_eq!(v.literal_bound, 2.0);
    let rep = square_distance_check(&flat2([0.0, 0.0]), &SymMatrix::identity(2), &[vec![2.0, 0.0]]).unwrap();
    let s = &rep.samples[0];
    assert!((s.box_rho - 0.5).abs() < 1e-14);
    assert!((s.literal_k - 4.0).abs() < 1e-14);
    assert!(s.literal_holds && s.standard_holds);
}

#[test]
fn literal_bound_fails_near_base_point() {
    let rep = square_distance_check(&flat2([0.0, 0.0]), &SymMatrix::identity(2), &[vec![0.0, 0.1]]).unwrap();
    let s = &rep.samples[0];
    assert!((s.box_rho - 10.0).abs() < 1e-10);
    assert!((s.literal_k - 0.2).abs() < 1e-12);
    assert!((s.standard_k - 20.0).abs() < 1e-10);
    assert!(!s.literal_holds && s.standard_holds);
    assert_eq!(rep.literal_violations, 1);
}

#[test]
fn zero_phi_and_indefinite_phi() {
    let m = flat2([0.0, 0.0]);
    let rep = square_distance_check(&m, &SymMatrix::zeros(2), &[vec![0.3, 0.4]]).unwrap();
    assert_eq!(rep.samples[0].box_rho, 0.0);
    assert_eq!(rep.samples[0].literal_k, 0.0);
    let bad = SymMatrix::from_diagonal(&[1.0, -0.5]);
    assert!(matches!(square_distance_check(&m, &bad, &[vec![1.0, 0.0]]), Err(Error::Precondition(_))));
}

#[test]
fn standard_hessian_bound_on_all_models() {
    let models = [
        ModelManifold::flat(3, vec![0.0; 3]).unwrap(),
        ModelManifold::new(ModelKind::Hyperbolic, -0.8, 3, None).unwrap(),
        ModelManifold::new(ModelKind::Sphere, 1.5, 3, None).unwrap(),
    ];
    let phi = SymMatrix::from_diagonal(&[1.0, 0.5, 2.0]);
    for m in &models {
        let top = if m.kind == ModelKind::Sphere { 0.999 * m.max_distance() } else { 8.0 };
        let dir = [0.6, -0.48, 0.64];
        let pts: Vec<Vec<f64>> = (1..=100).map(|i| m.point_at(&dir, top * i as f64 / 100.0)).collect();
        let rep = square_distance_check(m, &phi, &pts).unwrap();
        assert_eq!(rep.hessian_violations, 0, "{:?}", m.kind);
        assert_eq!(rep.standard_violations, 0, "{:?}", m.kind);
        for s in &rep.samples {
            let b = m.comparison(s.rho).unwrap().standard_bound;
            assert!((s.tangential_hessian - b).abs() <= 1e-8 * b.abs().max(1.0), "{:?} ρ = {}", m.kind, s.rho);
        }
    }
}

#[test]
fn constant_function_stays_at_base_point() {
    let m = flat2([0.5, -0.2]);
    let f = TestFunction::new(FunctionFamily::Constant { value: 3.0 }, &m).unwrap();
    let run = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 6, &SearchConfig::default()).unwrap();
    assert!(run.unresolved.is_empty());
    for r in &run.records {
        assert!(r.rho < 1e-6, "k = {}: ρ = {}", r.k, r.rho);
        assert_eq!(r.gradient_norm, 0.0);
        assert_eq!(r.square, 0.0);
    }
    let v = corollary_limits(&run, 3.0);
    assert!(v.all_hold && v.holds);
}

#[test]
fn attained_maximum_is_found_for_large_k() {
    let m = flat2([0.0, 0.0]);
    let q = [1.2, -0.7];
    let f = TestFunction::new(
        FunctionFamily::Gaussian {
            center: q.to_vec(),
            height: 2.0,
            width: 0.8,
        },
        &m,
    )
    .unwrap();
    let run = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 30, &SearchConfig::default()).unwrap();
    // Direct maximisation oracle: the distance from q shrinks like 1/k.
    let last = run.records.last().unwrap();
    let d = ((last.point[0] - q[0]).powi(2) + (last.point[1] - q[1]).powi(2)).sqrt();
    assert!(d < 0.02, "distance to q at k = 30: {d}");
    let first = &run.records[0];
    let d1 = ((first.point[0] - q[0]).powi(2) + (first.point[1] - q[1]).powi(2)).sqrt();
    assert!(d < d1 / 5.0);
}

/// Maximiser of `g_k` restricted to the ray from the origin through `p`,
/// by dense scan and golden-section refinement.
fn radial_oracle(p: f64, k: f64) -> f64 {
    let f = |r: f64| -1.0 / (1.0 + r * r);
    let g = |t: f64| (f(p + t) - f(p) + 1.0) / (t * t + 2.0).ln().powf(1.0 / k);
    let mut best = 0.0;
    let mut val = g(0.0);
    for i in 1..200_000 {
        let t = i as f64 * 1e-3;
        if g(t) > val {
            val = g(t);
            best = t;
        }
    }
    let (mut a, mut b) = ((best - 1e-3f64).max(0.0), best + 1e-3);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / 2.0
}

#[test]
fn radial_sequence_matches_one_dimensional_reduction() {
    let m = flat2([1.0, 0.0]);
    let f = inverse_quadratic(&m);
    let run = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 12, &SearchConfig::default()).unwrap();
    assert!(run.unresolved.is_empty());
    for r in &run.records {
        let t = radial_oracle(1.0, r.k as f64);
        assert!((r.point[0] - 1.0 - t).abs() < 1e-5 * (1.0 + t), "k = {}: {:?} vs {t}", r.k, r.point);
        assert!(r.point[1].abs() < 1e-5 * (1.0 + t));
        assert!(r.gradient_relative_residual < 1e-6);
        assert!(r.square_bound_holds);
    }
}

#[test]
fn sequence_tends_to_supremum() {
    let m = flat2([1.0, 0.0]);
    let f = inverse_quadratic(&m);
    let run = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 20, &SearchConfig::default()).unwrap();
    let v = corollary_limits(&run, 0.0);
    assert!(v.all_hold, "{:?}", v.rows);
    let f_vals: Vec<f64> = run.records.iter().map(|r| r.f_value).collect();
    assert!(f_vals.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(run.records.last().unwrap().rhs_square < run.records[0].rhs_square);
}

#[test]
fn bounded_below_path_mirrors_bounded_above() {
    let m = flat2([1.0, 0.0]);
    let f = inverse_quadratic(&m);
    let neg = f.negate();
    let (inf, _) = neg.infimum(&m);
    assert_eq!(inf, 0.0);
    let above = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 8, &SearchConfig::default()).unwrap();
    let below = corollary_limits_below(&above, inf);
    let direct = corollary_limits(&above, 0.0);
    assert_eq!(below.subsequence, direct.subsequence);
    assert_eq!(below.holds, direct.holds);
    assert_eq!(below.bound, Bound::Below);
}

#[test]
fn sphere_has_no_sequence() {
    let m = ModelManifold::new(ModelKind::Sphere, 1.0, 2, None).unwrap();
    let f = TestFunction::new(FunctionFamily::Constant { value: 0.0 }, &m).unwrap();
    let r = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 3, &SearchConfig::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn hyperbolic_sequence_resolves() {
    let m = ModelManifold::new(ModelKind::Hyperbolic, -1.0, 2, None).unwrap();
    let f = TestFunction::new(
        FunctionFamily::Gaussian {
            center: vec![0.3, 0.1],
            height: 1.0,
            width: 0.2,
        },
        &m,
    )
    .unwrap();
    let run = omori_yau_sequence(&m, &f, &SymMatrix::from_diagonal(&[1.0, 0.3]), 10, &SearchConfig::default())
        .unwrap();
    assert!(run.unresolved.is_empty());
    assert!(run.max_gradient_residual() < 1e-6);
    assert!(run.records.iter().all(|r| r.square_bound_holds));
}

#[test]
fn akutagawa_trivial_cases() {
    let p = AkutagawaParams::from_beta(1.0, 3.0);
    let zero = AkutagawaSample {
        f: 0.0,
        gradient: vec![0.0, 0.0],
        hessian: SymMatrix::zeros(2),
        phi: SymMatrix::identity(2),
    };
    let rep = akutagawa_transform_check(&[zero], p).unwrap();
    let row = &rep.rows[0];
    assert_eq!(row.derivative_residual, 0.0);
    assert_eq!(row.lhs, 0.0);
    assert_eq!(row.rhs, 0.0);
    assert_eq!(rep.min_slack, Some(0.0));
    let bad = AkutagawaParams::from_beta(1.0, 1.0);
    assert!(matches!(akutagawa_transform_check(&[], bad), Err(Error::Precondition(_))));
}

#[test]
fn akutagawa_chain_on_synthetic_samples() {
    for beta in [1.5, 2.0, 3.0] {
        let samples = synthetic_samples(3, 300, 0.7, beta, 11);
        let rep = akutagawa_transform_check(&samples, AkutagawaParams::from_beta(0.7, beta)).unwrap();
        assert_eq!(rep.hypothesis_count, samples.len());
        assert!(rep.max_identity_residual < 1e-10);
        assert!(rep.max_ratio_residual < 1e-10);
        assert!(rep.min_slack.unwrap() >= -1e-9);
    }
}

#[test]
fn negative_f_is_rejected() {
    let s = AkutagawaSample {
        f: -0.1,
        gradient: vec![0.0],
        hessian: SymMatrix::zeros(1),
        phi: SymMatrix::identity(1),
    };
    assert!(akutagawa_transform_check(&[s], AkutagawaParams::from_beta(1.0, 2.0)).is_err());
}

#[test]
fn scenario_round_trip() {
    let json = r#"{
        "model": "flat", "dim": 2, "base_point": [1.0, 0.0],
        "function": {"family": "inverse_quadratic", "amplitude": 1.0},
        "phi": {"diagonal": [1.0, 1.0]},
        "k_max": 5,
        "search": {"starts": 8}
    }"#;
    let sc = Scenario::from_json(json).unwrap();
    assert_eq!(sc.search.starts, 8);
    assert_eq!(sc.search.radius_cap, 1e6);
    let rep = sc.run().unwrap();
    assert!(rep.passed());
    assert_eq!(rep.above.records.len(), 5);
    let again = sc.run().unwrap();
    assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn origin_base_point_needs_a_subsequence() {
    let m = flat2([0.0, 0.0]);
    let f = inverse_quadratic(&m);
    let run = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 20, &SearchConfig::default()).unwrap();
    let v = corollary_limits(&run, 0.0);
    assert!(!v.rows[0].square_ok);
    assert!(!v.all_hold && v.holds, "{:?}", v.subsequence);
    assert!(run.max_gradient_residual() < 1e-6);
}
