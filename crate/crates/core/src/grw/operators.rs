use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::frames::{FrameData, NodeFrame};
use crate::error::{config, range, Result};
use crate::symfunc::SymMatrix;

/// Intrinsic Hessian of a sampled function at one node.
#[derive(Debug, Clone)]
pub struct NodeHessian {
    pub index: usize,
    /// `∂f`
    pub differential: Vec<f64>,
    /// `Hess f` in coordinates.
    pub coordinate: DMatrix<f64>,
    /// `Hess f` in the orthonormal frame.
    pub frame: SymMatrix,
    /// `∇f` in the orthonormal frame.
    pub frame_gradient: Vec<f64>,
}

fn check_sampled(frames: &FrameData, f: &[f64]) -> Result<()> {
    if f.len() != frames.grid.len() {
        return Err(config(format!(
            "function has {} samples for {} grid nodes",
            f.len(),
            frames.grid.len()
        )));
    }
    Ok(())
}

fn hessian_at(frames: &FrameData, frame: &NodeFrame, f: &[f64]) -> NodeHessian {
    let grid = &frames.grid;
    let differential = grid.gradient(f, frame.index);
    let coordinate = frame.covariant_hessian(&grid.second_derivatives(f, frame.index), &differential);
    NodeHessian {
        index: frame.index,
        frame: frame.to_frame(&coordinate),
        frame_gradient: frame.gradient_in_frame(&differential),
        differential,
        coordinate,
    }
}

/// `Hess f_ij = ∂²_ij f - Γ̂^k_ij ∂_k f` at every frame node.
pub fn intrinsic_hessian(frames: &FrameData, f: &[f64]) -> Result<Vec<NodeHessian>> {
    check_sampled(frames, f)?;
    Ok(frames
        .nodes
        .par_iter()
        .map(|fr| hessian_at(frames, fr, f))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightGradientNode {
    pub index: usize,
    /// `ĝ^{ij} ∂_j h`
    pub intrinsic: Vec<f64>,
    /// Coordinate part of `-∂_t - ⟨N, ∂_t⟩ N`.
    pub ambient: Vec<f64>,
    pub residual: f64,
    /// `⟨∇h, ∇h⟩`
    pub norm_sq: f64,
    /// `|⟨∇h, ∇h⟩ - (⟨N, ∂_t⟩² - 1)|`
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightGradientReport {
    pub nodes: Vec<HeightGradientNode>,
    pub max_residual: f64,
    pub max_identity_residual: f64,
}

/// `∇h` computed intrinsically and from the ambient splitting of `∂_t`.
pub fn height_gradient(frames: &FrameData) -> HeightGradientReport {
    let nodes: Vec<HeightGradientNode> = frames
        .nodes
        .par_iter()
        .map(|fr| {
            let du = nalgebra::DVector::from_column_slice(&fr.du);
            let intrinsic: Vec<f64> = (&fr.metric_inv * &du).iter().copied().collect();
            let ambient: Vec<f64> = fr.normal[1..].iter().map(|nk| fr.normal[0] * nk).collect();
            let residual = intrinsic
                .iter()
                .zip(&ambient)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let norm_sq = du.dot(&(&fr.metric_inv * &du));
            let identity_residual = (norm_sq - (fr.normal_dot_dt.powi(2) - 1.0)).abs();
            HeightGradientNode {
                index: fr.index,
                intrinsic,
                ambient,
                residual,
                norm_sq,
                identity_residual,
            }
        })
        .collect();
    let max_residual = nodes.iter().map(|n| n.residual).fold(0.0, f64::max);
    let max_identity_residual = nodes.iter().map(|n| n.identity_residual).fold(0.0, f64::max);
    HeightGradientReport {
        nodes,
        max_residual,
        max_identity_residual,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualNode {
    pub index: usize,
    /// Finite-difference side.
    pub computed: f64,
    /// Closed-form side.
    pub formula: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub r: usize,
    pub nodes: Vec<ResidualNode>,
    pub max_residual: f64,
    /// `max |formula|`, for scale.
    pub max_formula: f64,
}

impl ResidualReport {
    fn from_nodes(r: usize, nodes: Vec<ResidualNode>) -> Self {
        let max_residual = nodes.iter().map(|n| n.residual).fold(0.0, f64::max);
        let max_formula = nodes.iter().map(|n| n.formula.abs()).fold(0.0, f64::max);
        Self {
            r,
            nodes,
            max_residual,
            max_formula,
        }
    }
}

/// `L_r(h)` at one node from the closed-form expression
/// `-(log g)'(h) {b_r H_r + ⟨P_r ∇h, ∇h⟩} - b_r H_{r+1} ⟨N, ∂_t⟩`.
pub fn lr_height_formula(fr: &NodeFrame, r: usize) -> f64 {
    let inv = &fr.invariants;
    let grad = fr.gradient_in_frame(&fr.du);
    let quad = fr.newton[r].quadratic_form(&grad);
    -fr.log_derivative * (inv.b[r] * inv.h[r] + quad) - inv.b[r] * inv.h[r + 1] * fr.normal_dot_dt
}

/// Compares `tr(P_r Hess h)` with the closed form for `L_r(h)`.
pub fn lr_height_verify(frames: &FrameData, r: usize) -> Result<ResidualReport> {
    let n = frames.dim();
    if r + 1 > n {
        return Err(range(format!("order r = {r} outside 0..={}", n - 1)));
    }
    let hess = intrinsic_hessian(frames, &frames.heights)?;
    let nodes = frames
        .nodes
        .par_iter()
        .zip(hess.par_iter())
        .map(|(fr, h)| {
            let computed = fr.newton[r].trace_product(&h.frame);
            let formula = lr_height_formula(fr, r);
            ResidualNode {
                index: fr.index,
                computed,
                formula,
                residual: (computed - formula).abs(),
            }
        })
        .collect();
    Ok(ResidualReport::from_nodes(r, nodes))
}

/// A scalar function of one variable with two derivatives.
pub trait Profile: Sync {
    fn value(&self, s: f64) -> f64;
    fn d1(&self, s: f64) -> f64;
    fn d2(&self, s: f64) -> f64;
}

/// `φ(s) = s`
#[derive(Debug, Clone, Copy)]
pub struct IdentityProfile;

impl Profile for IdentityProfile {
    fn value(&self, s: f64) -> f64 {
        s
    }
    fn d1(&self, _: f64) -> f64 {
        1.0
    }
    fn d2(&self, _: f64) -> f64 {
        0.0
    }
}

/// `φ(s) = s²`
#[derive(Debug, Clone, Copy)]
pub struct SquareProfile;

impl Profile for SquareProfile {
    fn value(&self, s: f64) -> f64 {
        s * s
    }
    fn d1(&self, s: f64) -> f64 {
        2.0 * s
    }
    fn d2(&self, _: f64) -> f64 {
        2.0
    }
}

/// `φ(s) = e^{-s + t0}`
#[derive(Debug, Clone, Copy)]
pub struct ExpProfile {
    pub t0: f64,
}

impl Profile for ExpProfile {
    fn value(&self, s: f64) -> f64 {
        (self.t0 - s).exp()
    }
    fn d1(&self, s: f64) -> f64 {
        -(self.t0 - s).exp()
    }
    fn d2(&self, s: f64) -> f64 {
        (self.t0 - s).exp()
    }
}

/// Compares `tr(P_r Hess(φ∘h))` with `φ''(h)⟨P_r ∇h, ∇h⟩ + φ'(h) tr(P_r Hess h)`.
pub fn lr_compose_verify(frames: &FrameData, r: usize, phi: &dyn Profile) -> Result<ResidualReport> {
    let n = frames.dim();
    if r > n {
        return Err(range(format!("order r = {r} outside 0..={n}")));
    }
    let composed: Vec<f64> = frames.heights.iter().map(|&h| phi.value(h)).collect();
    let hess_h = intrinsic_hessian(frames, &frames.heights)?;
    let hess_phi = intrinsic_hessian(frames, &composed)?;
    let nodes = frames
        .nodes
        .par_iter()
        .zip(hess_h.par_iter().zip(hess_phi.par_iter()))
        .map(|(fr, (hh, hp))| {
            let p = &fr.newton[r];
            let computed = p.trace_product(&hp.frame);
            let formula = phi.d2(fr.height) * p.quadratic_form(&hh.frame_gradient)
                + phi.d1(fr.height) * p.trace_product(&hh.frame);
            ResidualNode {
                index: fr.index,
                computed,
                formula,
                residual: (computed - formula).abs(),
            }
        })
        .collect();
    Ok(ResidualReport::from_nodes(r, nodes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimumCheck {
    pub index: usize,
    pub node: Vec<usize>,
    pub coords: Vec<f64>,
    pub warp_d1: f64,
    /// Principal curvatures in the orientation with
    /// `sign⟨N, ∂_t⟩ = -sign g'(h)`.
    pub lemma_principal: Vec<f64>,
    pub elliptic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticScan {
    /// Nodes where every principal curvature is negative, in the frames'
    /// own orientation.
    pub elliptic_nodes: Vec<usize>,
    pub minima: Vec<MinimumCheck>,
    pub lemma_holds: bool,
    pub vacuous: bool,
}

/// Flags elliptic nodes and checks that each interior local minimum of
/// `g∘h` with `g'(h) ≠ 0` is elliptic.
pub fn elliptic_point_scan(frames: &FrameData) -> EllipticScan {
    let grid = &frames.grid;
    let warp = frames.ambient.warp;
    let gh: Vec<f64> = frames.heights.iter().map(|&h| warp.value(h)).collect();
    let elliptic_nodes = frames
        .nodes
        .iter()
        .filter(|f| f.principal.iter().all(|&l| l < 0.0))
        .map(|f| f.index)
        .collect();
    let s = frames.orientation.sign();
    let minima: Vec<MinimumCheck> = frames
        .nodes
        .iter()
        .filter(|f| f.warp_d1 != 0.0)
        .filter(|f| grid.neighbours(f.index).iter().all(|&j| gh[j] >= gh[f.index]))
        .map(|f| {
            let flip = if s == f.warp_d1.signum() { 1.0 } else { -1.0 };
            let lemma_principal: Vec<f64> = f.principal.iter().map(|l| flip * l).collect();
            MinimumCheck {
                index: f.index,
                node: grid.multi_index(f.index),
                coords: grid.coords(f.index),
                warp_d1: f.warp_d1,
                elliptic: lemma_principal.iter().all(|&l| l < 0.0),
                lemma_principal,
            }
        })
        .collect();
    EllipticScan {
        elliptic_nodes,
        lemma_holds: minima.iter().all(|m| m.elliptic),
        vacuous: minima.is_empty(),
        minima,
    }
}
