use serde::Serialize;

use super::model::ModelManifold;
use super::sequence::standard_k;
use crate::error::{precondition, range, Result};
use crate::symfunc::SymMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSample {
    pub point: Vec<f64>,
    pub rho: f64,
    /// `tr(Φ Hess ρ)`
    pub box_rho: f64,
    pub literal_k: f64,
    pub standard_k: f64,
    pub literal_holds: bool,
    pub standard_holds: bool,
    /// Largest eigenvalue of `Hess ρ` on `∇ρ^⊥`.
    pub tangential_hessian: f64,
    /// `Hess ρ(∇ρ, ∇ρ)`
    pub radial_hessian: f64,
    /// `Hess ρ(w, w) ≤ (sn'/sn)|w|²` for `w ⊥ ∇ρ` and `Hess ρ(∇ρ, ∇ρ) = 0`.
    pub hessian_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub samples: Vec<LemmaSample>,
    pub literal_violations: usize,
    pub standard_violations: usize,
    pub hessian_violations: usize,
}

const TOL: f64 = 1e-10;

/// Compares exact `□ρ` against both comparison bounds at each sample.
pub fn square_distance_check(model: &ModelManifold, phi: &SymMatrix, points: &[Vec<f64>]) -> Result<LemmaReport> {
    let ev = phi.eigenvalues()?;
    if phi.dim() != model.dim || ev[0] < -1e-12 * phi.max_abs().max(1.0) {
        return Err(precondition("Φ must be a positive semi-definite matrix of the model dimension"));
    }
    let trace = phi.trace();
    let lambda_max = ev[ev.len() - 1];
    let samples = points
        .iter()
        .map(|x| {
            let j = model.distance_jet(x)?;
            if j.rho >= model.max_distance() {
                return Err(range("sample at or beyond the cut locus"));
            }
            let hess = model.to_frame(x, &model.covariant_hessian(x, &j.d1, &j.d2));
            let cmp = model.comparison(j.rho)?;
            let box_rho = phi.trace_product(&hess);
            let literal_k = cmp.literal_bound * trace;
            let standard_k = standard_k(cmp.standard_bound, trace, lambda_max);
            // Unit radial direction in the orthonormal frame.
            let sigma = model.conformal_factor(x);
            let nu: Vec<f64> = j.d1.iter().map(|v| v / sigma).collect();
            let radial_hessian = hess.quadratic_form(&nu);
            let (vals, vecs) = hess.eigen()?;
            let tangential_hessian = (0..vals.len())
                .filter(|&i| {
                    let dot: f64 = vecs.column(i).iter().zip(&nu).map(|(a, b)| a * b).sum();
                    dot.abs() < 0.5
                })
                .map(|i| vals[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let scale = cmp.standard_bound.abs().max(1.0);
            let hessian_bound_holds = (tangential_hessian == f64::NEG_INFINITY
                || tangential_hessian <= cmp.standard_bound + TOL * scale)
                && radial_hessian.abs() <= TOL * scale;
            let box_scale = box_rho.abs().max(1.0);
            Ok(LemmaSample {
                point: x.clone(),
                rho: j.rho,
                box_rho,
                literal_k,
                standard_k,
                literal_holds: box_rho <= literal_k + TOL * box_scale,
                standard_holds: box_rho <= standard_k + TOL * box_scale,
                tangential_hessian,
                radial_hessian,
                hessian_bound_holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport {
        literal_violations: samples.iter().filter(|s| !s.literal_holds).count(),
        standard_violations: samples.iter().filter(|s| !s.standard_holds).count(),
        hessian_violations: samples.iter().filter(|s| !s.hessian_bound_holds).count(),
        samples,
    })
}
