use rayon::prelude::*;
use serde::Serialize;

use super::phi::{elliptic_point_exists, is_zero_h, PhiField, ZERO_TOL};
use crate::error::{config, range, Result};
use crate::grw::{intrinsic_hessian, FrameData, ResidualNode, ResidualReport};
use crate::symfunc::{newton_transform, CurvatureInvariants, Spectrum, SymMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareNode {
    pub index: usize,
    /// `tr(Φ Hess f)`
    pub value: f64,
    /// `H_{r-1} · tr(P_{r-1} Hess f)`
    pub factored: f64,
    /// `|value - factored| / Σ|Φ_ij||Hess f_ij|`
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareReport {
    pub r: usize,
    pub nodes: Vec<SquareNode>,
    pub max_relative_residual: f64,
    pub semidefinite: bool,
    pub elliptic_point: bool,
}

fn entrywise_majorant(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.as_matrix().iter().zip(b.as_matrix().iter()).map(|(x, y)| (x * y).abs()).sum()
}

/// `□f = tr(Φ Hess f)` at every frame node.
pub fn square(frames: &FrameData, phi: &PhiField, f: &[f64]) -> Result<SquareReport> {
    if phi.nodes.len() != frames.nodes.len() {
        return Err(config("Φ field was built on different frames"));
    }
    let hess = intrinsic_hessian(frames, f)?;
    let r = phi.r;
    let nodes: Vec<SquareNode> = phi
        .nodes
        .par_iter()
        .zip(frames.nodes.par_iter().zip(hess.par_iter()))
        .map(|(p, (fr, h))| {
            let value = p.phi.trace_product(&h.frame);
            let factored = fr.invariants.h[r - 1] * fr.newton[r - 1].trace_product(&h.frame);
            let scale = entrywise_majorant(&p.phi, &h.frame);
            let relative_residual = if scale > 0.0 {
                (value - factored).abs() / scale
            } else {
                0.0
            };
            SquareNode {
                index: p.index,
                value,
                factored,
                relative_residual,
            }
        })
        .collect();
    let max_relative_residual = nodes.iter().map(|n| n.relative_residual).fold(0.0, f64::max);
    Ok(SquareReport {
        r,
        nodes,
        max_relative_residual,
        semidefinite: phi.worst_scaled_min_eigenvalue() >= -1e-10,
        elliptic_point: elliptic_point_exists(frames),
    })
}

/// `L_r(fg) = f L_r(g) + g L_r(f) + 2⟨P_r ∇f, ∇g⟩` node by node.
pub fn product_rule_verify(frames: &FrameData, r: usize, f: &[f64], g: &[f64]) -> Result<ResidualReport> {
    let n = frames.dim();
    if r > n {
        return Err(range(format!("order r = {r} outside 0..={n}")));
    }
    let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    let hf = intrinsic_hessian(frames, f)?;
    let hg = intrinsic_hessian(frames, g)?;
    let hfg = intrinsic_hessian(frames, &fg)?;
    let nodes: Vec<ResidualNode> = frames
        .nodes
        .par_iter()
        .enumerate()
        .map(|(k, fr)| {
            let p = &fr.newton[r];
            let (i, a, b) = (fr.index, &hf[k], &hg[k]);
            let pgrad: Vec<f64> = (0..n)
                .map(|row| (0..n).map(|c| p.as_matrix()[(row, c)] * a.frame_gradient[c]).sum())
                .collect();
            let cross: f64 = pgrad.iter().zip(&b.frame_gradient).map(|(x, y)| x * y).sum();
            let computed = p.trace_product(&hfg[k].frame);
            let formula = f[i] * p.trace_product(&b.frame) + g[i] * p.trace_product(&a.frame) + 2.0 * cross;
            ResidualNode {
                index: i,
                computed,
                formula,
                residual: (computed - formula).abs(),
            }
        })
        .collect();
    let max_residual = nodes.iter().map(|n| n.residual).fold(0.0, f64::max);
    let max_formula = nodes.iter().map(|n| n.formula.abs()).fold(0.0, f64::max);
    Ok(ResidualReport {
        r,
        nodes,
        max_residual,
        max_formula,
    })
}

/// Sign pattern of a symmetric matrix's spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    PositiveSemidefinite,
    NegativeSemidefinite,
    Indefinite,
}

impl Definiteness {
    pub fn classify(eigenvalues: &[f64], tol: f64) -> Self {
        let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo > tol {
            Definiteness::PositiveDefinite
        } else if hi < -tol {
            Definiteness::NegativeDefinite
        } else if lo >= -tol {
            Definiteness::PositiveSemidefinite
        } else if hi <= tol {
            Definiteness::NegativeSemidefinite
        } else {
            Definiteness::Indefinite
        }
    }

    pub fn is_semidefinite(self) -> bool {
        self != Definiteness::Indefinite
    }

    pub fn is_definite(self) -> bool {
        matches!(self, Definiteness::PositiveDefinite | Definiteness::NegativeDefinite)
    }
}

/// Which hypothesis pattern a node falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefinitenessPattern {
    /// `H_r = 0`: `P_{r-1}` semidefinite.
    Null,
    /// `H_r = 0`, `H_{r+1} ≠ 0`: `P_{r-1}` definite.
    NullNondegenerate,
    /// `H_r > 0` everywhere with an elliptic point: `P_{r-1}` positive definite.
    PositiveElliptic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefinitenessCase {
    pub pattern: DefinitenessPattern,
    pub index: usize,
    pub coords: Vec<f64>,
    pub principal: Vec<f64>,
    pub newton_eigenvalues: Vec<f64>,
    pub class: Definiteness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefinitenessAudit {
    pub r: usize,
    pub null_nodes: usize,
    pub null_nondegenerate_nodes: usize,
    pub positive_elliptic_applicable: bool,
    pub positive_elliptic_nodes: usize,
    pub counterexamples: Vec<DefinitenessCase>,
}

impl DefinitenessAudit {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Spectral definiteness verdict for `P_{r-1}` of a diagonal operator.
pub fn newton_definiteness(spectrum: &Spectrum, r: usize) -> Result<(Vec<DefinitenessPattern>, Definiteness)> {
    let n = spectrum.dim();
    if r == 0 || r > n {
        return Err(range(format!("order r = {r} outside 1..={n}")));
    }
    let a = SymMatrix::from_diagonal(spectrum.values());
    let p = newton_transform(&a, r - 1)?;
    let ev = p.eigenvalues()?;
    let inv = spectrum.invariants();
    let class = Definiteness::classify(&ev, ZERO_TOL * p.max_abs().max(1.0));
    Ok((patterns(spectrum.values(), &inv, r, false), class))
}

fn patterns(principal: &[f64], inv: &CurvatureInvariants, r: usize, positive_elliptic: bool) -> Vec<DefinitenessPattern> {
    let n = principal.len();
    let mut out = Vec::new();
    if is_zero_h(principal, inv.h[r], r) {
        out.push(DefinitenessPattern::Null);
        if r < n && !is_zero_h(principal, inv.h[r + 1], r + 1) && inv.h[r + 1].abs() > 1e-8 {
            out.push(DefinitenessPattern::NullNondegenerate);
        }
    }
    if positive_elliptic {
        out.push(DefinitenessPattern::PositiveElliptic);
    }
    out
}

fn pattern_holds(pattern: DefinitenessPattern, class: Definiteness) -> bool {
    match pattern {
        DefinitenessPattern::Null => class.is_semidefinite(),
        DefinitenessPattern::NullNondegenerate => class.is_definite(),
        DefinitenessPattern::PositiveElliptic => class == Definiteness::PositiveDefinite,
    }
}

/// Checks the sign pattern of `P_{r-1}` under each applicable hypothesis.
pub fn definiteness_audit(frames: &FrameData, r: usize) -> Result<DefinitenessAudit> {
    let n = frames.dim();
    if r == 0 || r > n {
        return Err(range(format!("order r = {r} outside 1..={n}")));
    }
    let elig = super::phi::eligibility(frames, r);
    let positive_elliptic_applicable = elig.hr_positive_everywhere && elig.elliptic_point;
    let per_node: Vec<(Vec<DefinitenessPattern>, Vec<DefinitenessCase>)> = frames
        .nodes
        .par_iter()
        .map(|f| {
            let pats = patterns(&f.principal, &f.invariants, r, positive_elliptic_applicable);
            if pats.is_empty() {
                return Ok((pats, Vec::new()));
            }
            let p = &f.newton[r - 1];
            let ev = p.eigenvalues()?;
            let class = Definiteness::classify(&ev, ZERO_TOL * p.max_abs().max(1.0));
            let bad = pats
                .iter()
                .filter(|&&pat| !pattern_holds(pat, class))
                .map(|&pattern| DefinitenessCase {
                    pattern,
                    index: f.index,
                    coords: frames.grid.coords(f.index),
                    principal: f.principal.clone(),
                    newton_eigenvalues: ev.clone(),
                    class,
                })
                .collect();
            Ok((pats, bad))
        })
        .collect::<Result<_>>()?;
    let count = |p: DefinitenessPattern| per_node.iter().filter(|(ps, _)| ps.contains(&p)).count();
    Ok(DefinitenessAudit {
        r,
        null_nodes: count(DefinitenessPattern::Null),
        null_nondegenerate_nodes: count(DefinitenessPattern::NullNondegenerate),
        positive_elliptic_applicable,
        positive_elliptic_nodes: count(DefinitenessPattern::PositiveElliptic),
        counterexamples: per_node.into_iter().flat_map(|(_, bad)| bad).collect(),
    })
}

/// Pattern check on a bare spectrum; `Err` cases are out-of-range orders.
pub fn spectrum_definiteness_holds(spectrum: &Spectrum, r: usize) -> Result<bool> {
    let (pats, class) = newton_definiteness(spectrum, r)?;
    Ok(pats.iter().all(|&p| pattern_holds(p, class)))
}
