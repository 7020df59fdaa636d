use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phi::{PhiField, ZERO_TOL};
use crate::error::{config, range, Result};
use crate::grw::{intrinsic_hessian, FrameData, NodeFrame, Orientation, Warp};
use crate::symfunc::{gauss_curvature_data, Spectrum};

/// Gradient coefficient in
/// `□(e^{-h+t0}) = e^{-h+t0}{k⟨Φ∇h, ∇h⟩ + b_{r-1}[H_{r-1}² + H_{r-1}H_r⟨N, ∂_t⟩]}`
/// as fixed by the chain rule and confirmed by [`coefficient_adjudication`].
pub const GRADIENT_COEFFICIENT: f64 = 2.0;

/// Gradient coefficient of the intermediate `L_{r-1}(e^{-h+t0})` display
/// in its literal form; reported for comparison only.
pub const LITERAL_LR_COEFFICIENT: f64 = 1.0;

/// Absolute slack per unit of `b_{r-1}` in the inequality audit.
pub const AUDIT_SLACK: f64 = 1e-8;

const SECTIONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxAuditParams {
    pub t0: f64,
    pub c1: f64,
    pub c2: f64,
    pub beta: f64,
    #[serde(default = "default_coefficient")]
    pub gradient_coefficient: f64,
}

fn default_coefficient() -> f64 {
    GRADIENT_COEFFICIENT
}

impl BoxAuditParams {
    pub fn new(t0: f64, c1: f64, c2: f64, beta: f64) -> Self {
        Self {
            t0,
            c1,
            c2,
            beta,
            gradient_coefficient: GRADIENT_COEFFICIENT,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 1.0) {
            return Err(config(format!("β = {} must exceed 1", self.beta)));
        }
        if !(self.c1 > 0.0 && self.c1 <= self.c2) {
            return Err(config(format!("need 0 < C1 ≤ C2, got {} and {}", self.c1, self.c2)));
        }
        if !self.t0.is_finite() {
            return Err(config("t0 must be finite"));
        }
        Ok(())
    }
}

/// Node-checkable hypotheses of the two nonexistence statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeHypotheses {
    pub over_slice: bool,
    pub nonnegative_sectional: bool,
    /// `H_r ≡ 0` on the patch, `C1 ≤ |H_{r-1}| ≤ C2`, `Φ ⪰ 0` here.
    pub maximal_case: bool,
    /// Opposite orientation, `H_r > 0` on the patch with an elliptic point,
    /// `C1 ≤ H_{r-1} ≤ C2`, `⟨N, ∂_t⟩ ≥ 1`, `Φ ≻ 0` here.
    pub positive_case: bool,
}

impl NodeHypotheses {
    pub fn audited(&self) -> bool {
        self.over_slice && self.nonnegative_sectional && (self.maximal_case || self.positive_case)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxAuditNode {
    pub index: usize,
    pub coords: Vec<f64>,
    pub height: f64,
    /// `b_{r-1}`
    pub b: f64,
    /// `tr(Φ Hess e^{-h+t0})` by finite differences.
    pub direct: f64,
    /// Closed form with the configured gradient coefficient.
    pub closed: f64,
    /// Closed form with the literal intermediate coefficient.
    pub closed_literal: f64,
    /// `C1² b_{r-1} e^{β(-h+t0)}`
    pub bound: f64,
    pub margin: f64,
    pub direct_margin: f64,
    /// `e^{-(h-t0)} ≥ e^{-β(h-t0)}` wherever `h ≥ t0`.
    pub exp_monotone: bool,
    pub hypotheses: NodeHypotheses,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxAudit {
    pub r: usize,
    pub params: BoxAuditParams,
    pub orientation: Orientation,
    pub nodes: Vec<BoxAuditNode>,
    pub audited: usize,
    pub failures: usize,
    /// Audited nodes where the finite-difference value misses the bound.
    pub direct_failures: usize,
    pub below_slice: usize,
    pub vacuous: bool,
    /// `max |direct - closed|` over all nodes.
    pub max_closed_residual: f64,
}

/// `e^{-h+t0} H_{r-1}{k⟨P_{r-1}∇h, ∇h⟩ + b_{r-1}[H_{r-1} + H_r⟨N, ∂_t⟩]}`
pub fn box_exponential_closed_form(fr: &NodeFrame, r: usize, t0: f64, coefficient: f64) -> f64 {
    let inv = &fr.invariants;
    let grad = fr.gradient_in_frame(&fr.du);
    let quad = fr.newton[r - 1].quadratic_form(&grad);
    let hm = inv.h[r - 1];
    (t0 - fr.height).exp()
        * hm
        * (coefficient * quad + inv.b[r - 1] * (hm + inv.h[r] * fr.normal_dot_dt))
}

fn require_steady_state(frames: &FrameData) -> Result<()> {
    if frames.ambient.warp != Warp::SteadyState {
        return Err(config("the exponential audit is defined on the Steady State space"));
    }
    Ok(())
}

/// Audits `□(e^{-h+t0}) ≥ C1² b_{r-1} e^{β(-h+t0)}` wherever the node-checkable
/// hypotheses hold.
pub fn box_exponential_audit(frames: &FrameData, phi: &PhiField, params: BoxAuditParams) -> Result<BoxAudit> {
    params.validate()?;
    require_steady_state(frames)?;
    let r = phi.r;
    if phi.nodes.len() != frames.nodes.len() {
        return Err(config("Φ field was built on different frames"));
    }
    let exp_f: Vec<f64> = frames.heights.iter().map(|h| (params.t0 - h).exp()).collect();
    let hess = intrinsic_hessian(frames, &exp_f)?;
    let elig = phi.eligibility;
    let opposite = frames.orientation == Orientation::Opposite;
    let nodes = frames
        .nodes
        .par_iter()
        .zip(phi.nodes.par_iter().zip(hess.par_iter()))
        .map(|(fr, (p, h))| {
            let inv = &fr.invariants;
            let b = inv.b[r - 1];
            let hm = inv.h[r - 1];
            let gap = fr.height - params.t0;
            let over_slice = gap >= 0.0;
            let exp_monotone = !over_slice || (-gap).exp() >= (-params.beta * gap).exp();
            let k_min = gauss_curvature_data(&Spectrum::new(fr.principal.clone())?, 1.0)?.min_sectional();
            let psd_tol = ZERO_TOL * p.phi.max_abs().max(1.0);
            let maximal_case = elig.hr_zero_everywhere
                && (params.c1..=params.c2).contains(&hm.abs())
                && p.min_eigenvalue >= -psd_tol;
            let positive_case = opposite
                && elig.hr_positive_everywhere
                && elig.elliptic_point
                && (params.c1..=params.c2).contains(&hm)
                && fr.normal_dot_dt >= 1.0 - 1e-12
                && p.min_eigenvalue > psd_tol;
            let hypotheses = NodeHypotheses {
                over_slice,
                nonnegative_sectional: k_min >= -SECTIONAL_TOL,
                maximal_case,
                positive_case,
            };
            let direct = p.phi.trace_product(&h.frame);
            let closed = box_exponential_closed_form(fr, r, params.t0, params.gradient_coefficient);
            let closed_literal = box_exponential_closed_form(fr, r, params.t0, LITERAL_LR_COEFFICIENT);
            let bound = params.c1 * params.c1 * b * (-params.beta * gap).exp();
            let margin = closed - bound;
            let failed = hypotheses.audited() && margin < -AUDIT_SLACK * b;
            Ok(BoxAuditNode {
                index: fr.index,
                coords: frames.grid.coords(fr.index),
                height: fr.height,
                b,
                direct,
                closed,
                closed_literal,
                bound,
                margin,
                direct_margin: direct - bound,
                exp_monotone,
                hypotheses,
                failed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let audited = nodes.iter().filter(|n| n.hypotheses.audited()).count();
    let failures = nodes.iter().filter(|n| n.failed).count();
    let direct_failures = nodes
        .iter()
        .filter(|n| n.hypotheses.audited() && n.direct_margin < -AUDIT_SLACK * n.b)
        .count();
    let below_slice = nodes.iter().filter(|n| !n.hypotheses.over_slice).count();
    let max_closed_residual = nodes.iter().map(|n| (n.direct - n.closed).abs()).fold(0.0, f64::max);
    Ok(BoxAudit {
        r,
        params,
        orientation: frames.orientation,
        nodes,
        audited,
        failures,
        direct_failures,
        below_slice,
        vacuous: audited == 0,
        max_closed_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateResidual {
    pub coefficient: f64,
    /// `max |tr(P_{r-1} Hess e^{-h+t0}) - closed form|`
    pub max_residual: f64,
}

/// Which gradient coefficient in the closed form of `L_{r-1}(e^{-h+t0})`
/// agrees with a direct discretisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientAdjudication {
    pub r: usize,
    pub t0: f64,
    pub candidates: Vec<CandidateResidual>,
    /// The best candidate, if it beats every other by at least `10×`.
    pub adjudicated: Option<f64>,
    pub literal_lr_coefficient: f64,
    pub literal_box_coefficient: f64,
    /// `max |∇h|²`; the test only discriminates when this is well above the
    /// discretisation error.
    pub max_gradient_sq: f64,
}

pub fn coefficient_adjudication(frames: &FrameData, r: usize, t0: f64) -> Result<CoefficientAdjudication> {
    require_steady_state(frames)?;
    let n = frames.dim();
    if r == 0 || r > n {
        return Err(range(format!("order r = {r} outside 1..={n}")));
    }
    let exp_f: Vec<f64> = frames.heights.iter().map(|h| (t0 - h).exp()).collect();
    let hess = intrinsic_hessian(frames, &exp_f)?;
    let rows: Vec<(f64, f64, f64)> = frames
        .nodes
        .par_iter()
        .zip(hess.par_iter())
        .map(|(fr, h)| {
            let inv = &fr.invariants;
            let grad = fr.gradient_in_frame(&fr.du);
            let quad = fr.newton[r - 1].quadratic_form(&grad);
            let rest = inv.b[r - 1] * (inv.h[r - 1] + inv.h[r] * fr.normal_dot_dt);
            let direct = fr.newton[r - 1].trace_product(&h.frame) / (t0 - fr.height).exp();
            let gsq: f64 = grad.iter().map(|v| v * v).sum();
            (direct - rest, quad, gsq)
        })
        .collect();
    let candidates: Vec<CandidateResidual> = [1.0, GRADIENT_COEFFICIENT]
        .iter()
        .map(|&k| CandidateResidual {
            coefficient: k,
            max_residual: rows
                .iter()
                .zip(&frames.nodes)
                .map(|((d, q, _), fr)| (d - k * q).abs() * (t0 - fr.height).exp())
                .fold(0.0, f64::max),
        })
        .collect();
    let best = candidates
        .iter()
        .min_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        .expect("two candidates");
    let decisive = candidates
        .iter()
        .filter(|c| c.coefficient != best.coefficient)
        .all(|c| c.max_residual >= 10.0 * best.max_residual);
    Ok(CoefficientAdjudication {
        r,
        t0,
        adjudicated: decisive.then_some(best.coefficient),
        literal_lr_coefficient: LITERAL_LR_COEFFICIENT,
        literal_box_coefficient: GRADIENT_COEFFICIENT,
        max_gradient_sq: rows.iter().map(|r| r.2).fold(0.0, f64::max),
        candidates,
    })
}
