use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::ModelManifold;
use super::testfn::{squared_distance_jet, TestFunction};
use crate::error::{config, precondition, Result};
use crate::symfunc::SymMatrix;

/// Multi-start search settings for the maximisers of `g_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub starts: usize,
    pub initial_radius: f64,
    pub radius_cap: f64,
    pub seed: u64,
    pub max_iterations: usize,
    /// A maximiser counts as interior when `ρ ≤ interior_fraction · R`.
    pub interior_fraction: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            initial_radius: 1.0,
            radius_cap: 1e6,
            seed: 0,
            max_iterations: 400,
            interior_fraction: 0.9,
        }
    }
}

/// One term of the maximising sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceRecord {
    pub k: usize,
    pub point: Vec<f64>,
    pub rho: f64,
    pub f_value: f64,
    pub gradient_norm: f64,
    /// `□f(p_k)`
    pub square: f64,
    /// `2(f(p_k) - f(p) + 1)ρ / (k(ρ² + 2) log(ρ² + 2))`
    pub rhs_gradient: f64,
    /// Upper bound for `□f(p_k)` with `K = s_c' s_c tr Φ`.
    pub rhs_square: f64,
    /// The same bound with the classical comparison `K`.
    pub rhs_square_standard: f64,
    pub gradient_relative_residual: f64,
    pub square_bound_holds: bool,
    pub square_bound_literal_holds: bool,
    pub objective: f64,
    pub search_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unresolved {
    pub k: usize,
    pub last_radius: f64,
    pub best_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmoriYauRun {
    pub base_point: Vec<f64>,
    pub f_base: f64,
    pub k_max: usize,
    pub records: Vec<SequenceRecord>,
    pub unresolved: Vec<Unresolved>,
}

impl OmoriYauRun {
    pub fn max_gradient_residual(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.gradient_relative_residual)
            .fold(0.0, f64::max)
    }
}

struct Objective<'a> {
    model: &'a ModelManifold,
    f: &'a TestFunction,
    f_base: f64,
    k: f64,
}

impl Objective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        let (q, _, _) = squared_distance_jet(self.model, x);
        (self.f.value(self.model, x) - self.f_base + 1.0) * (q + 2.0).ln().powf(-1.0 / self.k)
    }

    /// `g_k`, `∂g_k`, `∂²g_k` in chart coordinates.
    fn jet(&self, x: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let fj = self.f.jet(self.model, x);
        let (q, dq, d2q) = squared_distance_jet(self.model, x);
        let big_f = fj.value - self.f_base + 1.0;
        let l = (q + 2.0).ln();
        let psi = l.powf(-1.0 / self.k);
        let m = -1.0 / (self.k * (q + 2.0) * l);
        let dm = (l + 1.0) / (self.k * (q + 2.0).powi(2) * l * l);
        let grad = (&fj.d1 + &dq * (big_f * m)) * psi;
        let cross = &fj.d1 * dq.transpose();
        let hess = (&fj.d2
            + (&cross + cross.transpose()) * m
            + (&dq * dq.transpose() * (m * m + dm) + d2q * m) * big_f)
            * psi;
        (big_f * psi, grad, hess)
    }
}

fn random_start(model: &ModelManifold, rng: &mut ChaCha8Rng, radius: f64) -> Vec<f64> {
    let n = model.dim;
    let dir = loop {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm2: f64 = d.iter().map(|v| v * v).sum();
        if norm2 > 1e-6 && norm2 <= 1.0 {
            break d;
        }
    };
    let u: f64 = rng.random();
    model.point_at(&dir, radius * u.powf(1.0 / n as f64))
}

fn admissible(model: &ModelManifold, x: &[f64], radius: f64) -> bool {
    model.in_chart(x) && model.distance(x) <= radius
}

/// Normalised-gradient ascent with adaptive steps, then Newton polish.
fn local_ascent(obj: &Objective<'_>, mut x: Vec<f64>, radius: f64, iters: usize) -> (Vec<f64>, f64) {
    let model = obj.model;
    let mut val = obj.value(&x);
    let mut step = 0.1 * radius.min(1.0).max(model.distance(&x) * 0.1);
    for _ in 0..iters {
        let (_, grad, _) = obj.jet(&x);
        let gnorm = grad.norm();
        if gnorm == 0.0 {
            break;
        }
        let scale = 1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if step < 1e-12 * scale {
            break;
        }
        let cand: Vec<f64> = x.iter().zip(grad.iter()).map(|(a, g)| a + step * g / gnorm).collect();
        if admissible(model, &cand, radius) {
            let v = obj.value(&cand);
            if v > val {
                x = cand;
                val = v;
                step *= 2.0;
                continue;
            }
        }
        step *= 0.5;
    }
    for _ in 0..30 {
        let (_, grad, hess) = obj.jet(&x);
        let Some(chol) = nalgebra::Cholesky::new(-&hess) else { break };
        let delta = chol.solve(&grad);
        let cand: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
        if !admissible(model, &cand, radius) {
            break;
        }
        let v = obj.value(&cand);
        if v < val - 1e-15 * val.abs() {
            break;
        }
        let moved = delta.norm();
        x = cand;
        val = v.max(val);
        if moved <= 1e-15 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()) {
            break;
        }
    }
    (x, val)
}

fn check_phi(model: &ModelManifold, phi: &SymMatrix) -> Result<Vec<f64>> {
    if phi.dim() != model.dim {
        return Err(config(format!("Φ is {0}×{0} on a {1}-dimensional model", phi.dim(), model.dim)));
    }
    let ev = phi.eigenvalues()?;
    if ev[0] < -1e-12 * phi.max_abs().max(1.0) {
        return Err(precondition(format!("Φ is not positive semi-definite (λ_min = {})", ev[0])));
    }
    Ok(ev)
}

/// `Hess ρ` comparison constant on `tr(Φ Hess ρ)` with the classical bound.
pub(crate) fn standard_k(standard_bound: f64, trace: f64, lambda_max: f64) -> f64 {
    if standard_bound >= 0.0 {
        standard_bound * trace
    } else {
        standard_bound * (trace - lambda_max)
    }
}

/// Maximisers `p_k` of `g_k = (f - f(p) + 1) / log(ρ² + 2)^{1/k}` for
/// `k = 1..=k_max`, with the gradient identity and `□f` bounds at each.
pub fn omori_yau_sequence(
    model: &ModelManifold,
    f: &TestFunction,
    phi: &SymMatrix,
    k_max: usize,
    search: &SearchConfig,
) -> Result<OmoriYauRun> {
    if !model.cut_locus_free() {
        return Err(precondition("the sequence construction needs a model without cut locus"));
    }
    if k_max == 0 || search.starts == 0 || !(search.initial_radius > 0.0) {
        return Err(config("k_max, starts and initial_radius must be positive"));
    }
    f.validate(model)?;
    let ev = check_phi(model, phi)?;
    let trace = phi.trace();
    let lambda_max = ev[ev.len() - 1];
    let p = model.base_point.clone();
    let f_base = f.value(model, &p);

    let mut records = Vec::new();
    let mut unresolved = Vec::new();
    for k in 1..=k_max {
        let obj = Objective {
            model,
            f,
            f_base,
            k: k as f64,
        };
        let mut radius = search.initial_radius;
        let mut level = 0u64;
        let found = loop {
            let (x, val) = (0..search.starts)
                .into_par_iter()
                .map(|s| {
                    let start = if s == 0 {
                        p.clone()
                    } else {
                        let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
                        rng.set_stream(((k as u64) << 40) ^ (level << 20) ^ s as u64);
                        random_start(model, &mut rng, radius)
                    };
                    local_ascent(&obj, start, radius, search.max_iterations)
                })
                .reduce_with(|a, b| if b.1 > a.1 { b } else { a })
                .expect("at least one start");
            let rho = model.distance(&x);
            if rho <= search.interior_fraction * radius {
                break Some((x, val, radius));
            }
            if radius * 2.0 > search.radius_cap {
                unresolved.push(Unresolved {
                    k,
                    last_radius: radius,
                    best_rho: rho,
                });
                break None;
            }
            radius *= 2.0;
            level += 1;
        };
        let Some((x, val, radius)) = found else { continue };
        records.push(record(model, f, phi, trace, lambda_max, f_base, k, x, val, radius)?);
    }
    Ok(OmoriYauRun {
        base_point: p,
        f_base,
        k_max,
        records,
        unresolved,
    })
}

#[allow(clippy::too_many_arguments)]
fn record(
    model: &ModelManifold,
    f: &TestFunction,
    phi: &SymMatrix,
    trace: f64,
    lambda_max: f64,
    f_base: f64,
    k: usize,
    x: Vec<f64>,
    objective: f64,
    search_radius: f64,
) -> Result<SequenceRecord> {
    let kf = k as f64;
    let jet = f.jet(model, &x);
    let rho = model.distance(&x);
    let big_f = jet.value - f_base + 1.0;
    let q2 = rho * rho + 2.0;
    let l = q2.ln();
    let gradient_norm = model.gradient_norm(&x, &jet.d1);
    let hess = model.to_frame(&x, &model.covariant_hessian(&x, &jet.d1, &jet.d2));
    let square = phi.trace_product(&hess);
    let rhs_gradient = 2.0 * big_f * rho / (kf * q2 * l);
    let first = 4.0 * trace * rho * rho * big_f / (kf * kf * q2 * q2 * l * l);
    let coeff = 2.0 * big_f / (kf * q2 * l);
    let (k_literal, k_std) = if rho > 0.0 {
        let cmp = model.comparison(rho)?;
        (cmp.literal_bound * trace, standard_k(cmp.standard_bound, trace, lambda_max))
    } else {
        (0.0, 0.0)
    };
    let rhs_square = first + coeff * (trace + rho * k_literal);
    let rhs_square_standard = first + coeff * (trace + rho * k_std);
    let denom = gradient_norm.max(rhs_gradient);
    let gradient_relative_residual = if denom < 1e-300 {
        0.0
    } else {
        (gradient_norm - rhs_gradient).abs() / denom
    };
    let tol = 1e-9 * rhs_square_standard.abs().max(square.abs()).max(1e-12);
    Ok(SequenceRecord {
        k,
        rho,
        f_value: jet.value,
        gradient_norm,
        square,
        rhs_gradient,
        rhs_square,
        rhs_square_standard,
        gradient_relative_residual,
        square_bound_holds: square <= rhs_square_standard + tol,
        square_bound_literal_holds: square <= rhs_square + tol,
        objective,
        search_radius,
        point: x,
    })
}

/// Which corollary a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Above,
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub k: usize,
    pub value_ok: bool,
    pub gradient_ok: bool,
    pub square_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryVerdict {
    pub bound: Bound,
    /// `sup f` for [`Bound::Above`], `inf f` for [`Bound::Below`].
    pub extremum: f64,
    pub k_max: usize,
    pub rows: Vec<CorollaryRow>,
    /// Indices where all three inequalities hold, increasing.
    pub subsequence: Vec<usize>,
    pub density: f64,
    pub all_hold: bool,
    pub holds: bool,
}

/// `f(p_k) > sup f - 1/k`, `|∇f(p_k)| < 1/k`, `□f(p_k) < 1/k`.
///
/// The verdict holds when the indices satisfying all three form at least
/// half of `1..=k_max`; unresolved indices count as failures.
pub fn corollary_limits(run: &OmoriYauRun, sup: f64) -> CorollaryVerdict {
    verdict(run, sup, Bound::Above)
}

/// The bounded-below statement for `f`, given a run on `-f` and `inf f`.
pub fn corollary_limits_below(run_on_negated: &OmoriYauRun, inf: f64) -> CorollaryVerdict {
    verdict(run_on_negated, -inf, Bound::Below)
}

fn verdict(run: &OmoriYauRun, sup: f64, bound: Bound) -> CorollaryVerdict {
    let rows: Vec<CorollaryRow> = run
        .records
        .iter()
        .map(|r| {
            let eps = 1.0 / r.k as f64;
            CorollaryRow {
                k: r.k,
                value_ok: r.f_value > sup - eps,
                gradient_ok: r.gradient_norm < eps,
                square_ok: r.square < eps,
            }
        })
        .collect();
    let subsequence: Vec<usize> = rows
        .iter()
        .filter(|r| r.value_ok && r.gradient_ok && r.square_ok)
        .map(|r| r.k)
        .collect();
    let density = subsequence.len() as f64 / run.k_max as f64;
    let extremum = match bound {
        Bound::Above => sup,
        Bound::Below => -sup,
    };
    CorollaryVerdict {
        bound,
        extremum,
        k_max: run.k_max,
        all_hold: subsequence.len() == run.k_max,
        holds: density >= 0.5,
        subsequence,
        density,
        rows,
    }
}
