//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hypercurv::cli::{random_symmetric, run_audit, AuditConfig, AuditFamily};
use hypercurv::grw::{
    build_frames, curvature_report, lr_height_verify, FrameData, GraphHypersurface, Grid, HeightFamily, Orientation,
    WarpedProduct,
};
use hypercurv::maxprin::{
    akutagawa_transform_check, comparison_functions, corollary_limits, omori_yau_sequence, square_distance_check,
    synthetic_samples, AkutagawaParams, FunctionFamily, ModelKind, ModelManifold, SearchConfig, TestFunction,
};
use hypercurv::square::coefficient_adjudication;
use hypercurv::symfunc::{newton_maclaurin_check, newton_transforms, rational, ChainVerdict, SymMatrix};
use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

/// `e_0..=e_n` by the product expansion.
fn elem_sym(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (k, &v) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

fn choose(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn trace_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst, mut pn_worst) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let n = 2 + i % 7;
        let a = random_symmetric(&mut rng, n);
        let m = a.as_matrix().clone();
        let lambda: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        let s = elem_sym(&lambda);
        let abs: Vec<f64> = lambda.iter().map(|v| v.abs()).collect();
        let sa = elem_sym(&abs);
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let p = newton_transforms(&a).unwrap();
        let m2 = &m * &m;
        let expanded = |r: usize, j: usize| -> f64 {
            (0..=r)
                .map(|k| sa[r - k] * abs.iter().map(|v| v.powi((k + j) as i32)).sum::<f64>())
                .sum()
        };
        for r in 0..n {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let b = (n - r) as f64 * choose(n, r);
            let h = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 } * at(&s, k) / choose(n, k);
            let pr = p[r].as_matrix();
            let checks = [
                (pr.trace(), b * h(r), ((n - r) as f64 * at(&sa, r)).max(expanded(r, 0))),
                ((&m * pr).trace(), -b * h(r + 1), ((r + 1) as f64 * at(&sa, r + 1)).max(expanded(r, 1))),
                (
                    (&m2 * pr).trace(),
                    sign * (at(&s, 1) * at(&s, r + 1) - (r + 2) as f64 * at(&s, r + 2)),
                    (at(&sa, 1) * at(&sa, r + 1) + (r + 2) as f64 * at(&sa, r + 2)).max(expanded(r, 2)),
                ),
            ];
            for (computed, closed, scale) in checks {
                worst = worst.max((computed - closed).abs() / scale.max(f64::MIN_POSITIVE));
            }
        }
        let norm = a.norm_inf();
        pn_worst = pn_worst.max(p[n].max_abs() / norm.powi(n as i32));
    }
    outcome(
        worst <= 1e-9 && pn_worst <= 1e-8,
        format!("1000 matrices, worst relative {worst:.2e}, worst |P_n|/|A|^n {pn_worst:.2e}"),
    )
}

fn newton_maclaurin() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    let mut library_violations = 0;
    for i in 0..10_000 {
        let n = 2 + i % 7;
        let lo = if i % 3 == 0 { 0.0 } else { -3.0 };
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..3.0)).collect();
        let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        let (s, sa) = (elem_sym(&values), elem_sym(&abs));
        let h = |v: &[f64], r: usize| v[r] / choose(n, r);
        for r in 1..n {
            let gap = h(&s, r).powi(2) - h(&s, r - 1) * h(&s, r + 1);
            let scale = h(&sa, r).powi(2) + h(&sa, r - 1) * h(&sa, r + 1);
            worst = worst.max(-gap / scale);
        }
        library_violations += usize::from(!newton_maclaurin_check(&values, n).holds());
    }
    let mut equality_ok = true;
    for n in 2..=8 {
        let values = vec![rational(rng.random_range(-9..10), rng.random_range(1..7)); n];
        let v = newton_maclaurin_check(&values, n);
        equality_ok &= v.exact && v.holds() && v.gaps.iter().all(|g| g.equality && g.gap == 0.0);
        if values[0] > rational(0, 1) {
            equality_ok &= matches!(v.chain, ChainVerdict::Holds { ref equalities, .. } if equalities.len() == n - 1);
        }
        let mut unequal = values.clone();
        unequal[0] = unequal[0].clone() + rational(1, 3);
        let u = newton_maclaurin_check(&unequal, n);
        equality_ok &= u.holds() && u.gaps.iter().all(|g| !g.equality || g.all_equal.is_none());
    }
    let mut vanishing_ok = true;
    for n in 2..=8usize {
        for r in 1..n {
            let mut values: Vec<BigRational> = (1..r).map(|k| rational(k as i64 + 1, 2)).collect();
            values.resize(n, rational(0, 1));
            let v = newton_maclaurin_check(&values, n);
            vanishing_ok &= v.holds() && v.vanishing.iter().any(|c| c.r == r && c.propagates);
        }
    }
    outcome(
        worst <= 1e-12 && library_violations == 0 && equality_ok && vanishing_ok,
        format!(
            "10^4 spectra, worst negative excursion {:.2e}, library violations {library_violations}, exact equality {equality_ok}, vanishing {vanishing_ok}",
            worst
        ),
    )
}

fn slice_frames(n: usize, m: usize) -> FrameData {
    let amb = WarpedProduct::steady_state(n).unwrap();
    let g = GraphHypersurface::from_family(amb, Grid::cube(n, -1.0, 1.0, m).unwrap(), &HeightFamily::Slice { t0: 0.3 })
        .unwrap();
    build_frames(&g, Orientation::Same).unwrap()
}

fn slice_geometry() -> Outcome {
    let mut worst = 0.0f64;
    for (n, m) in [(2, 32), (3, 16)] {
        let fr = slice_frames(n, m);
        for node in &fr.nodes {
            let a = node.shape.as_matrix() + DMatrix::identity(n, n);
            worst = worst.max(a.abs().max());
            for r in 0..=n {
                worst = worst.max((node.invariants.h[r] - 1.0).abs());
            }
        }
        for row in curvature_report(&fr).unwrap() {
            worst = worst.max(row.scalar_curvature.unwrap().abs());
        }
    }
    outcome(worst <= 1e-10, format!("32² and 16³ slices, worst deviation {worst:.2e}"))
}

fn periodic_trig(n: usize, m: usize) -> FrameData {
    let amb = WarpedProduct::steady_state(n).unwrap();
    let mut nodes = vec![m; n];
    let mut wavenumbers = vec![1.0, 1.0];
    if n == 3 {
        nodes[2] = 5;
        wavenumbers.push(0.0);
    }
    let grid = Grid::new(vec![0.0; n], vec![TAU / m as f64; n], nodes).unwrap();
    let fam = HeightFamily::Trig {
        t0: 0.2,
        amplitude: 0.01,
        wavenumbers,
    };
    build_frames(&GraphHypersurface::from_family(amb, grid, &fam).unwrap(), Orientation::Same).unwrap()
}

fn lrh_convergence() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for r in 0..=2 {
        let n = if r == 2 { 3 } else { 2 };
        let res: Vec<f64> = [32, 64, 128]
            .iter()
            .map(|&m| lr_height_verify(&periodic_trig(n, m), r).unwrap().max_residual)
            .collect();
        let q = [res[0] / res[1], res[1] / res[2]];
        ok &= q.iter().all(|&v| v >= 3.5);
        detail.push(format!("r={r} (n={n}) ratios {:.2}/{:.2}", q[0], q[1]));
    }
    let amb = WarpedProduct::steady_state(2).unwrap();
    let steep = HeightFamily::Trig {
        t0: 0.2,
        amplitude: 0.3,
        wavenumbers: vec![1.0, 1.0],
    };
    let grid = Grid::new(vec![0.0; 2], vec![TAU / 64.0; 2], vec![64; 2]).unwrap();
    let steep = build_frames(&GraphHypersurface::from_family(amb, grid, &steep).unwrap(), Orientation::Same).unwrap();
    for (label, fr) in [("amplitude 0.01", periodic_trig(2, 64)), ("amplitude 0.3", steep)] {
        for r in [1, 2] {
            let adj = coefficient_adjudication(&fr, r, 0.2).unwrap();
            let cands: Vec<String> = adj
                .candidates
                .iter()
                .map(|c| format!("{}: {:.2e}", c.coefficient, c.max_residual))
                .collect();
            println!(
                "    coefficient adjudication, {label}, r={r}: max|∇h|² {:.2e}, residuals {}, adjudicated {:?}",
                adj.max_gradient_sq,
                cands.join(", "),
                adj.adjudicated
            );
            if label == "amplitude 0.3" {
                ok &= adj.adjudicated.is_some();
            }
        }
    }
    outcome(ok, detail.join("; "))
}

/// Maximiser of `g_k` along the ray from the origin through `(p, 0)`.
fn radial_oracle(p: f64, k: f64) -> f64 {
    let f = |r: f64| -1.0 / (1.0 + r * r);
    let g = |t: f64| (f(p + t) - f(p) + 1.0) / (t * t + 2.0).ln().powf(1.0 / k);
    let (mut best, mut val) = (0.0, g(0.0));
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
        let (c, d) = (b - phi * (b - a), a + phi * (b - a));
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / 2.0
}

fn omori_yau() -> Outcome {
    let m = ModelManifold::flat(2, vec![1.0, 0.0]).unwrap();
    let f = TestFunction::new(FunctionFamily::InverseQuadratic { amplitude: 1.0 }, &m).unwrap();
    let run = omori_yau_sequence(&m, &f, &SymMatrix::identity(2), 20, &SearchConfig::default()).unwrap();
    let verdict = corollary_limits(&run, 0.0);
    let mut oracle_gap = 0.0f64;
    for r in &run.records {
        let t = radial_oracle(1.0, r.k as f64);
        oracle_gap = oracle_gap.max(((r.point[0] - 1.0 - t).powi(2) + r.point[1].powi(2)).sqrt() / (1.0 + t));
    }
    let grad = run.max_gradient_residual();
    outcome(
        run.unresolved.is_empty() && verdict.all_hold && grad <= 1e-6 && oracle_gap <= 1e-5,
        format!(
            "{} resolved, corollary bounds on {}/20, gradient identity {grad:.2e}, radial oracle gap {oracle_gap:.2e}",
            run.records.len(),
            verdict.subsequence.len()
        ),
    )
}

fn comparison_lemma() -> Outcome {
    let dir = [0.8, -0.6];
    let phi = SymMatrix::identity(2);
    let mut ok = true;
    let mut worst = 0.0f64;
    for m in [
        ModelManifold::flat(2, vec![0.0, 0.0]).unwrap(),
        ModelManifold::new(ModelKind::Hyperbolic, -1.0, 2, None).unwrap(),
    ] {
        let radii: Vec<f64> = (1..=100).map(|i| 0.05 * i as f64).collect();
        let pts: Vec<Vec<f64>> = radii.iter().map(|&d| m.point_at(&dir, d)).collect();
        let rep = square_distance_check(&m, &phi, &pts).unwrap();
        ok &= rep.hessian_violations == 0 && rep.standard_violations == 0;
        for (s, &d) in rep.samples.iter().zip(&radii) {
            let exact = match m.kind {
                ModelKind::Flat => 1.0 / d,
                _ => 1.0 / d.tanh(),
            };
            worst = worst.max((s.rho - d).abs()).max((s.tangential_hessian - exact).abs() / exact);
        }
    }
    let flat = ModelManifold::flat(2, vec![0.0, 0.0]).unwrap();
    let radii: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
    let pts: Vec<Vec<f64>> = radii.iter().map(|&d| flat.point_at(&dir, d)).collect();
    let rep = square_distance_check(&flat, &phi, &pts).unwrap();
    let above_one = rep.samples.iter().filter(|s| s.rho >= 1.0 - 1e-12).all(|s| s.literal_holds);
    let below: Vec<f64> = rep.samples.iter().filter(|s| !s.literal_holds).map(|s| s.rho).collect();
    let c = comparison_functions(2.0, 0.0).unwrap();
    ok &= worst <= 1e-9 && above_one && !below.is_empty() && below.iter().all(|&r| r < 1.0) && c.literal_bound == 2.0;
    outcome(
        ok,
        format!(
            "standard bound at 200 radii (worst deviation {worst:.2e}); literal bound violated at {} radii, largest ρ = {:.2}",
            below.len(),
            below.iter().copied().fold(0.0, f64::max)
        ),
    )
}

fn akutagawa() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for beta in [1.5, 2.0, 3.0] {
        let a = 0.8;
        let params = AkutagawaParams::from_beta(a, beta);
        let alpha = params.alpha;
        let samples = synthetic_samples(2, 1000, a, beta, 7);
        let rep = akutagawa_transform_check(&samples, params).unwrap();
        // Independent recomputation of both sides of the chain.
        let mut worst = 0.0f64;
        let mut slack = f64::INFINITY;
        for s in &samples {
            let u = 1.0 + s.f;
            let (p, d1, d2) = (u.powf(-alpha), -alpha * u.powf(-alpha - 1.0), alpha * (alpha + 1.0) * u.powf(-alpha - 2.0));
            let phi = s.phi.as_matrix();
            let g = nalgebra::DVector::from_vec(s.gradient.clone());
            let hess_g = s.hessian.as_matrix() * d1 + &g * g.transpose() * d2;
            let box_f = phi.component_mul(s.hessian.as_matrix()).sum();
            let box_g = phi.component_mul(&hess_g).sum();
            let grad_g = &g * d1;
            let quad = (grad_g.transpose() * phi * &grad_g)[(0, 0)];
            let lhs = (alpha + 1.0) / alpha * quad - p * box_g;
            let rhs = alpha * p.powf((2.0 * alpha + 1.0) / alpha) * box_f;
            let scale = ((alpha + 1.0) / alpha * quad).abs() + p * phi.abs().component_mul(&hess_g.abs()).sum();
            worst = worst.max((lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE));
            if box_f >= a * s.f.powf(beta) {
                slack = slack.min(lhs - a * alpha * (s.f / u).powf(beta));
            }
        }
        let lib_ok = rep.max_derivative_residual <= 1e-10
            && rep.max_ratio_residual <= 1e-10
            && rep.max_identity_residual <= 1e-10
            && rep.min_slack.is_some_and(|v| v >= -1e-9);
        ok &= lib_ok && worst <= 1e-10 && slack >= -1e-9 && rep.hypothesis_count == 1000;
        detail.push(format!("β={beta}: identity {worst:.1e}, slack {slack:.2e}"));
    }
    outcome(ok, detail.join("; "))
}

fn nonexistence_audit() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (family, r) in [
        (AuditFamily::Mixed, 1),
        (AuditFamily::Mixed, 2),
        (AuditFamily::Caps, 1),
        (AuditFamily::Caps, 2),
    ] {
        let cfg = AuditConfig {
            r,
            seed: 8,
            ..AuditConfig::new(family)
        };
        let rep = run_audit(&cfg).unwrap();
        ok &= rep.key_failures == 0 && rep.scalar_mismatches == 0 && rep.verdicts.len() == 100;
        ok &= rep.verdicts.iter().all(|v| v.completeness == "unauditable");
        detail.push(format!(
            "{family} r={r}: {} audited nodes, {} failures, {} scalar mismatches, {} rejected",
            rep.audited_nodes, rep.key_failures, rep.scalar_mismatches, rep.rejected
        ));
    }
    outcome(ok, detail.join("; "))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 8] = [
        ("1 trace identities", trace_identities, Duration::from_secs(5)),
        ("2 Newton/Maclaurin", newton_maclaurin, Duration::from_secs(5)),
        ("3 slice geometry", slice_geometry, Duration::from_secs(2)),
        ("4 L_r(h) convergence", lrh_convergence, Duration::from_secs(20)),
        ("5 Omori-Yau sequence", omori_yau, Duration::from_secs(30)),
        ("6 comparison lemma", comparison_lemma, Duration::from_secs(2)),
        ("7 Akutagawa transform", akutagawa, Duration::from_secs(2)),
        ("8 nonexistence audit", nonexistence_audit, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.ok && took <= budget;
        failed += usize::from(!ok);
        println!(
            "{} [{name}] {} ({:.2}s, budget {}s)",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
