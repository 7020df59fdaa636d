use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::grw::{build_frames, curvature_report, GraphHypersurface, Grid, HeightFamily, Orientation, WarpedProduct};
use crate::square::product_rule_verify;
use crate::symfunc::{
    gauss_curvature_data, newton_maclaurin_check, rational, trace_identities, ChainVerdict, Comparison,
    Spectrum, SymMatrix,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentityConfig {
    pub seed: u64,
    /// Random symmetric matrices for the trace identities.
    pub matrices: usize,
    /// Random spectra for the Newton and Maclaurin inequalities.
    pub spectra: usize,
    /// Flips the sign of the `tr(A P_r)` closed form.
    pub inject_fault: bool,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            matrices: 1000,
            spectra: 10_000,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest residual in the suite's own unit.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub config: IdentityConfig,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

fn suite(name: &str, cases: usize, failures: usize, worst: f64, tolerance: f64) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        cases,
        failures,
        worst,
        tolerance,
        passed: failures == 0,
    }
}

/// Symmetric matrix with entries in `(-s, s)`, `s` log-uniform in `[0.1, 10]`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> SymMatrix {
    let s = 10f64.powf(rng.random_range(-1.0..1.0));
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-s..s));
    SymMatrix::symmetrized(&m)
}

fn trace_suites(cfg: &IdentityConfig, rng: &mut ChaCha8Rng) -> Result<[SuiteResult; 2]> {
    const TOL: f64 = 1e-9;
    const PN_TOL: f64 = 1e-8;
    let (mut fail, mut worst) = (0, 0.0f64);
    let (mut pn_fail, mut pn_worst) = (0, 0.0f64);
    for i in 0..cfg.matrices {
        let n = 2 + i % 7;
        let a = random_symmetric(rng, n);
        let rep = trace_identities(&a)?;
        let mut w = 0.0f64;
        for row in &rep.rows {
            let ap = if cfg.inject_fault {
                Comparison::new(row.trace_ap.computed, -row.trace_ap.closed_form, row.trace_ap.scale)
            } else {
                row.trace_ap
            };
            for c in [row.trace_p, ap, row.trace_a2p] {
                w = w.max(c.relative_residual);
            }
        }
        worst = worst.max(w);
        fail += usize::from(w > TOL);
        pn_worst = pn_worst.max(rep.pn_max_abs / rep.pn_unit);
        pn_fail += usize::from(!rep.pn_vanishes(PN_TOL));
    }
    Ok([
        suite("trace_identities", cfg.matrices, fail, worst, TOL),
        suite("newton_pn_vanishes", cfg.matrices, pn_fail, pn_worst, PN_TOL),
    ])
}

fn newton_maclaurin_suite(cfg: &IdentityConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let (mut fail, mut worst) = (0, 0.0f64);
    for i in 0..cfg.spectra {
        let n = 2 + i % 7;
        // Every third spectrum is positive.
        let lo = if i % 3 == 0 { 0.0 } else { -2.0 };
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..2.0)).collect();
        let v = newton_maclaurin_check(&values, n);
        fail += usize::from(!v.holds());
        worst = worst.max((-v.worst_scaled_gap()).max(0.0));
    }
    suite("newton_maclaurin", cfg.spectra, fail, worst, 1e-12)
}

fn exact_equality_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut fail = 0;
    let cases = 7 * 4;
    for i in 0..cases {
        let n = 2 + i % 7;
        let v = rational(rng.random_range(1..40), rng.random_range(1..9));
        let values = vec![v; n];
        let rep = newton_maclaurin_check(&values, n);
        let gaps_ok = rep.gaps.iter().all(|g| g.equality && g.all_equal == Some(true));
        let chain_ok = matches!(
            rep.chain,
            ChainVerdict::Holds { ref equalities, .. } if *equalities == (1..n).collect::<Vec<_>>()
        );
        fail += usize::from(!(gaps_ok && chain_ok && rep.holds() && rep.exact));
    }
    suite("maclaurin_equality_exact", cases, fail, 0.0, 0.0)
}

fn vanishing_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut fail = 0;
    let mut cases = 0;
    for n in 2..=8usize {
        for r in 1..n {
            cases += 1;
            let mut values: Vec<BigRational> = (0..r - 1)
                .map(|_| rational(rng.random_range(1..20) * if rng.random() { 1 } else { -1 }, rng.random_range(1..5)))
                .collect();
            values.resize(n, rational(0, 1));
            let rep = newton_maclaurin_check(&values, n);
            let found = rep.vanishing.iter().any(|c| c.r == r && c.propagates && c.nonzero_count < r);
            fail += usize::from(!(found && rep.holds()));
        }
    }
    suite("vanishing_propagation", cases, fail, 0.0, 0.0)
}

fn gauss_suite(cfg: &IdentityConfig, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    const TOL: f64 = 1e-10;
    let (mut fail, mut worst) = (0, 0.0f64);
    let count = cfg.matrices;
    for i in 0..count {
        let n = 2 + i % 7;
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let c = rng.random_range(-1.0..1.0);
        let scale: f64 = 1.0 + values.iter().map(|v| v * v).sum::<f64>() * n as f64;
        let g = gauss_curvature_data(&Spectrum::new(values)?, c)?;
        let w = (g.identity_residual.abs() + (g.pairwise_sum - g.scalar_curvature).abs()) / scale;
        worst = worst.max(w);
        fail += usize::from(w > TOL);
    }
    let fam = HeightFamily::RandomTrig {
        t0: 0.0,
        amplitude: 0.4,
        modes: 5,
        seed: cfg.seed,
    };
    let amb = WarpedProduct::steady_state(3)?;
    let g = GraphHypersurface::from_family(amb, Grid::cube(3, -1.0, 1.0, 10)?, &fam)?;
    let rows = curvature_report(&build_frames(&g, Orientation::Same)?)?;
    for row in &rows {
        let r = row.scalar_curvature.unwrap_or(0.0);
        let w = row.gauss_residual.unwrap_or(0.0).abs() / r.abs().max(1.0);
        worst = worst.max(w);
        fail += usize::from(w > TOL);
    }
    Ok(suite("gauss_consistency", count + rows.len(), fail, worst, TOL))
}

/// Second-order convergence of the discrete product rule on a random graph.
fn product_rule_suite(cfg: &IdentityConfig) -> Result<SuiteResult> {
    const RATIO: f64 = 3.5;
    let fam = HeightFamily::RandomTrig {
        t0: 0.0,
        amplitude: 0.3,
        modes: 4,
        seed: cfg.seed,
    };
    let mut res = Vec::new();
    for m in [40, 80, 160] {
        let amb = WarpedProduct::steady_state(2)?;
        let g = GraphHypersurface::from_family(amb, Grid::cube(2, -1.0, 1.0, m)?, &fam)?;
        let fr = build_frames(&g, Orientation::Same)?;
        let f = fr.grid.sample(|x| (x[0] + 2.0 * x[1]).sin());
        let h = fr.grid.sample(|x| (x[0] * x[1]).cos());
        res.push(product_rule_verify(&fr, 1, &f, &h)?.max_residual);
    }
    let ratios = [res[0] / res[1], res[1] / res[2]];
    let fail = ratios.iter().filter(|&&q| !(q >= RATIO)).count();
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(suite("product_rule_convergence", 2, fail, worst, RATIO))
}

/// Runs every randomized identity suite from one seed.
pub fn run_identities(cfg: &IdentityConfig) -> Result<IdentityReport> {
    if cfg.matrices == 0 || cfg.spectra == 0 {
        return Err(config("matrices and spectra must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut suites = Vec::new();
    suites.extend(trace_suites(cfg, &mut rng)?);
    suites.push(newton_maclaurin_suite(cfg, &mut rng));
    suites.push(exact_equality_suite(&mut rng));
    suites.push(vanishing_suite(&mut rng));
    suites.push(gauss_suite(cfg, &mut rng)?);
    suites.push(product_rule_suite(cfg)?);
    Ok(IdentityReport {
        config: cfg.clone(),
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}
