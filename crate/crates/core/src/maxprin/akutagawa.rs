use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{config, precondition, Result};
use crate::symfunc::SymMatrix;

/// Pointwise data of `f` at one sample: value, gradient and Hessian in an
/// orthonormal frame, and `Φ` in the same frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AkutagawaSample {
    pub f: f64,
    pub gradient: Vec<f64>,
    pub hessian: SymMatrix,
    pub phi: SymMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AkutagawaParams {
    pub alpha: f64,
    pub a: f64,
    pub beta: f64,
}

impl AkutagawaParams {
    /// `α = (β - 1)/2`.
    pub fn from_beta(a: f64, beta: f64) -> Self {
        Self {
            alpha: (beta - 1.0) / 2.0,
            a,
            beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkutagawaRow {
    /// `|φ'(f) + α φ(f)^{(α+1)/α}| / |φ'(f)|`
    pub derivative_residual: f64,
    /// `|φ''/φ'² - ((α+1)/α)/φ| / (((α+1)/α)/φ)`
    pub ratio_residual: f64,
    /// Relative residual of
    /// `((α+1)/α)⟨Φ∇g, ∇g⟩ - φ(f)□g = α φ(f)^{(2α+1)/α} □f`.
    pub identity_residual: f64,
    /// `□f ≥ a f^β` at this sample.
    pub hypothesis: bool,
    /// `((α+1)/α)⟨Φ∇g, ∇g⟩ - g□g`
    pub lhs: f64,
    /// `aα (f/(1+f))^β`
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AkutagawaReport {
    pub params: AkutagawaParams,
    pub rows: Vec<AkutagawaRow>,
    pub max_derivative_residual: f64,
    pub max_ratio_residual: f64,
    pub max_identity_residual: f64,
    /// Whether `α = (β - 1)/2`, the case in which the final inequality follows.
    pub fundamental_step_applicable: bool,
    pub hypothesis_count: usize,
    /// `min (lhs - rhs)` over samples satisfying the hypothesis.
    pub min_slack: Option<f64>,
}

fn relative(a: f64, b: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

/// Checks the transform `g = (1 + f)^{-α}` identities sample by sample.
pub fn akutagawa_transform_check(samples: &[AkutagawaSample], params: AkutagawaParams) -> Result<AkutagawaReport> {
    let AkutagawaParams { alpha, a, beta } = params;
    if !(alpha > 0.0) {
        return Err(precondition(format!("α = {alpha} must be positive")));
    }
    if !(a > 0.0 && beta > 1.0) {
        return Err(config(format!("need a > 0 and β > 1, got a = {a}, β = {beta}")));
    }
    let ratio_const = (alpha + 1.0) / alpha;
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        if !(s.f >= 0.0) {
            return Err(precondition(format!("f = {} must be non-negative", s.f)));
        }
        let n = s.gradient.len();
        if s.hessian.dim() != n || s.phi.dim() != n {
            return Err(config("sample dimensions disagree"));
        }
        let phi_f = (1.0 + s.f).powf(-alpha);
        let d1 = -alpha * (1.0 + s.f).powf(-alpha - 1.0);
        let d2 = alpha * (alpha + 1.0) * (1.0 + s.f).powf(-alpha - 2.0);
        let d1_closed = -alpha * phi_f.powf(ratio_const);
        let ratio = d2 / (d1 * d1);
        let ratio_closed = ratio_const / phi_f;

        let grad_g: Vec<f64> = s.gradient.iter().map(|v| d1 * v).collect();
        let outer = DMatrix::from_fn(n, n, |i, j| s.gradient[i] * s.gradient[j]);
        let hess_g = SymMatrix::symmetrized(&(s.hessian.as_matrix() * d1 + outer * d2));
        let box_f = s.phi.trace_product(&s.hessian);
        let box_g = s.phi.trace_product(&hess_g);
        let quad_g = s.phi.quadratic_form(&grad_g);
        let lhs = ratio_const * quad_g - phi_f * box_g;
        let identity_rhs = alpha * phi_f.powf((2.0 * alpha + 1.0) / alpha) * box_f;
        let scale = (ratio_const * quad_g).abs()
            + phi_f * s.phi.as_matrix().abs().component_mul(&hess_g.as_matrix().abs()).sum();
        let fundamental_rhs = a * alpha * (s.f / (1.0 + s.f)).powf(beta);
        rows.push(AkutagawaRow {
            derivative_residual: relative(d1, d1_closed, d1.abs()),
            ratio_residual: relative(ratio, ratio_closed, ratio_closed),
            identity_residual: relative(lhs, identity_rhs, scale),
            hypothesis: box_f >= a * s.f.powf(beta),
            lhs,
            rhs: fundamental_rhs,
        });
    }
    let max = |g: fn(&AkutagawaRow) -> f64| rows.iter().map(g).fold(0.0, f64::max);
    let fundamental_step_applicable = (alpha - (beta - 1.0) / 2.0).abs() <= 1e-12 * alpha.max(1.0);
    let held: Vec<&AkutagawaRow> = rows.iter().filter(|r| r.hypothesis).collect();
    let min_slack = if fundamental_step_applicable {
        held.iter().map(|r| r.lhs - r.rhs).reduce(f64::min)
    } else {
        None
    };
    Ok(AkutagawaReport {
        params,
        max_derivative_residual: max(|r| r.derivative_residual),
        max_ratio_residual: max(|r| r.ratio_residual),
        max_identity_residual: max(|r| r.identity_residual),
        fundamental_step_applicable,
        hypothesis_count: held.len(),
        min_slack,
        rows,
    })
}

/// Random samples in dimension `n` with `Φ ⪰ 0` and `□f ≥ a f^β` imposed
/// by shifting the Hessian along the identity.
pub fn synthetic_samples(n: usize, count: usize, a: f64, beta: f64, seed: u64) -> Vec<AkutagawaSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let f: f64 = if i == 0 { 0.0 } else { rng.random_range(0.0..5.0) };
            let gradient: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let phi = SymMatrix::symmetrized(&(&b * b.transpose() + DMatrix::identity(n, n) * 0.1));
            let h = DMatrix::from_fn(n, n, |_, _| rng.random_range(-3.0..3.0));
            let mut hessian = SymMatrix::symmetrized(&h);
            let target = a * f.powf(beta) + rng.random_range(0.0..1.0);
            let shift = (target - phi.trace_product(&hessian)) / phi.trace();
            hessian = SymMatrix::symmetrized(&(hessian.as_matrix() + DMatrix::identity(n, n) * shift));
            AkutagawaSample {
                f,
                gradient,
                hessian,
                phi,
            }
        })
        .collect()
}
