//! `L_r`, `□ = tr(Φ Hess ·)` with `Φ = H_{r-1} P_{r-1}`, and audits of the
//! pointwise inequalities built from them.

mod audit;
mod ops;
mod phi;

pub use audit::{
    box_exponential_audit, box_exponential_closed_form, coefficient_adjudication, BoxAudit,
    BoxAuditNode, BoxAuditParams, CandidateResidual, CoefficientAdjudication, NodeHypotheses,
    AUDIT_SLACK, GRADIENT_COEFFICIENT, LITERAL_LR_COEFFICIENT,
};
pub use ops::{
    definiteness_audit, newton_definiteness, product_rule_verify, spectrum_definiteness_holds,
    square, Definiteness, DefinitenessAudit, DefinitenessCase, DefinitenessPattern, SquareNode,
    SquareReport,
};
pub use phi::{eligibility, phi_from_curvature, Eligibility, PhiField, PhiNode, ZERO_TOL};
