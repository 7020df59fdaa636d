use rayon::prelude::*;
use serde::Serialize;

use crate::error::{range, Result};
use crate::grw::FrameData;
use crate::symfunc::SymMatrix;

/// Tolerance, relative to the curvature majorant, under which `H_r` counts
/// as zero on a sampled patch.
pub const ZERO_TOL: f64 = 1e-10;

/// `Φ = H_{r-1} P_{r-1}` at one node, in the orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiNode {
    pub index: usize,
    pub phi: SymMatrix,
    pub trace: f64,
    /// `b_{r-1} H_{r-1}²`
    pub closed_trace: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Which ellipticity hypotheses hold on the sampled patch.
///
/// Existence of an elliptic point is decided on the grid only; it does not
/// certify the corresponding statement on a complete hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Eligibility {
    pub hr_zero_everywhere: bool,
    pub hr_positive_everywhere: bool,
    pub elliptic_point: bool,
    pub eligible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiField {
    pub r: usize,
    pub nodes: Vec<PhiNode>,
    pub trace_sup: f64,
    pub eligibility: Eligibility,
}

impl PhiField {
    /// Smallest `λ_min(Φ) / max(‖Φ‖, 1)` over nodes.
    pub fn worst_scaled_min_eigenvalue(&self) -> f64 {
        self.nodes
            .iter()
            .map(|p| p.min_eigenvalue / p.phi.max_abs().max(1.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Majorant of `|H_r|` from `|λ_i|`, used to scale zero tests.
pub(crate) fn h_majorant(principal: &[f64], r: usize) -> f64 {
    let abs: Vec<f64> = principal.iter().map(|v| v.abs()).collect();
    let s = crate::symfunc::elementary_symmetric(&abs);
    s[r] / crate::symfunc::binomial(principal.len(), r) as f64
}

pub(crate) fn is_zero_h(principal: &[f64], h: f64, r: usize) -> bool {
    h.abs() <= ZERO_TOL * h_majorant(principal, r).max(1.0)
}

pub(crate) fn elliptic_point_exists(frames: &FrameData) -> bool {
    frames
        .nodes
        .iter()
        .any(|f| f.principal.iter().all(|&l| l < 0.0))
}

pub fn eligibility(frames: &FrameData, r: usize) -> Eligibility {
    let hr_zero_everywhere = frames
        .nodes
        .iter()
        .all(|f| is_zero_h(&f.principal, f.invariants.h[r], r));
    let hr_positive_everywhere = frames
        .nodes
        .iter()
        .all(|f| f.invariants.h[r] > 0.0 && !is_zero_h(&f.principal, f.invariants.h[r], r));
    let elliptic_point = elliptic_point_exists(frames);
    Eligibility {
        hr_zero_everywhere,
        hr_positive_everywhere,
        elliptic_point,
        eligible: hr_zero_everywhere || (hr_positive_everywhere && elliptic_point),
    }
}

/// `Φ = H_{r-1} P_{r-1}` over the frames, for `1 ≤ r ≤ n`.
pub fn phi_from_curvature(frames: &FrameData, r: usize) -> Result<PhiField> {
    let n = frames.dim();
    if r == 0 || r > n {
        return Err(range(format!("order r = {r} outside 1..={n}")));
    }
    let nodes = frames
        .nodes
        .par_iter()
        .map(|f| {
            let h = f.invariants.h[r - 1];
            let phi = f.newton[r - 1].scaled(h);
            let ev = phi.eigenvalues()?;
            Ok(PhiNode {
                index: f.index,
                trace: phi.trace(),
                closed_trace: f.invariants.b[r - 1] * h * h,
                min_eigenvalue: ev[0],
                max_eigenvalue: ev[n - 1],
                phi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trace_sup = nodes.iter().map(|p| p.trace).fold(f64::NEG_INFINITY, f64::max);
    Ok(PhiField {
        r,
        nodes,
        trace_sup,
        eligibility: eligibility(frames, r),
    })
}
