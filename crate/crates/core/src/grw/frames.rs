use nalgebra::{Cholesky, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid, HALO};
use super::surface::GraphHypersurface;
use super::warp::{AmbientCurvature, WarpedProduct};
use crate::error::{config, Error, Result};
use crate::symfunc::{
    elementary_symmetric, gauss_curvature_data, newton_transforms_from_sym, CurvatureInvariants,
    Spectrum, SymMatrix,
};

/// Time orientation of the unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `⟨N, ∂_t⟩ ≤ -1`
    Same,
    /// `⟨N, ∂_t⟩ ≥ 1`
    Opposite,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Same => 1.0,
            Orientation::Opposite => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Same => Orientation::Opposite,
            Orientation::Opposite => Orientation::Same,
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same" => Ok(Orientation::Same),
            "opposite" => Ok(Orientation::Opposite),
            other => Err(config(format!("unknown orientation {other:?}"))),
        }
    }
}

/// Geometry of the graph at one interior node.
///
/// Coordinate quantities refer to the basis `X_i = u_i ∂_t + ∂_i`; frame
/// quantities (`shape`, `newton`) refer to the ĝ-orthonormal basis
/// `e = X L^{-T}` where `ĝ = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct NodeFrame {
    pub index: usize,
    pub height: f64,
    pub du: Vec<f64>,
    /// `g(u)`
    pub warp: f64,
    /// `g'(u)`
    pub warp_d1: f64,
    /// `(log g)'(u)`
    pub log_derivative: f64,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub chol_inv: DMatrix<f64>,
    /// `christoffel[k][(i, j)] = Γ̂^k_ij`
    pub christoffel: Vec<DMatrix<f64>>,
    /// `(N^0, N^1, …, N^n)` in the coordinate basis `∂_t, ∂_1, …`.
    pub normal: Vec<f64>,
    pub normal_dot_dt: f64,
    /// `⟨N, N⟩`, expected to be `-1`.
    pub normal_norm: f64,
    /// `max_i |⟨N, X_i⟩|`
    pub tangency_defect: f64,
    /// `b_ij = ⟨A X_i, X_j⟩`, symmetrised.
    pub second_fundamental: DMatrix<f64>,
    /// Relative antisymmetric part of the assembled `b_ij`.
    pub asymmetry: f64,
    pub shape: SymMatrix,
    pub principal: Vec<f64>,
    pub invariants: CurvatureInvariants,
    /// `P̂_0, …, P̂_n` in the orthonormal frame.
    pub newton: Vec<SymMatrix>,
}

impl NodeFrame {
    pub fn dim(&self) -> usize {
        self.du.len()
    }

    /// Coordinate bilinear form to the orthonormal frame: `L^{-1} M L^{-T}`.
    pub fn to_frame(&self, m: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::symmetrized(&(&self.chol_inv * m * self.chol_inv.transpose()))
    }

    /// Coordinate differential `∂f` to frame components of `∇f`: `L^{-1} ∂f`.
    pub fn gradient_in_frame(&self, df: &[f64]) -> Vec<f64> {
        let v = &self.chol_inv * nalgebra::DVector::from_column_slice(df);
        v.iter().copied().collect()
    }

    /// `Hess f_ij = ∂²_ij f - Γ̂^k_ij ∂_k f` in coordinates.
    pub fn covariant_hessian(&self, d2f: &DMatrix<f64>, df: &[f64]) -> DMatrix<f64> {
        let mut h = d2f.clone();
        for (k, gamma) in self.christoffel.iter().enumerate() {
            h -= gamma * df[k];
        }
        h
    }
}

/// Per-node frames over the interior of a graph.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub ambient: WarpedProduct,
    pub grid: Grid,
    pub heights: Vec<f64>,
    pub orientation: Orientation,
    pub nodes: Vec<NodeFrame>,
}

impl FrameData {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }
}

struct RingData {
    du: Vec<f64>,
    normal: Vec<f64>,
}

fn spacelike_error(grid: &Grid, idx: usize, reason: String) -> Error {
    Error::Geometry {
        node: grid.multi_index(idx),
        coords: grid.coords(idx),
        reason,
    }
}

/// Builds frames at every node at least `HALO` nodes from the boundary.
///
/// The normal is `N = ±(∂_t + g^{-2} Σ u_i ∂_i) / W` with
/// `W = sqrt(1 - |Du|²/g²)`; the shape operator `A v = -(∇̄_v N)^T` uses the
/// closed-form connection of the warped product and central differences of
/// the components of `N`.
pub fn build_frames(graph: &GraphHypersurface, orientation: Orientation) -> Result<FrameData> {
    let grid = &graph.grid;
    let n = grid.dim();
    if grid.nodes().iter().any(|&m| m < 2 * HALO + 1) {
        return Err(config("grid too small for the stencil halo"));
    }
    let warp = graph.ambient.warp;
    let u = &graph.heights;
    let s = orientation.sign();

    let ring: Vec<Option<RingData>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            if !grid.within(idx, 1) {
                return Ok(None);
            }
            let du = grid.gradient(u, idx);
            let g = warp.value(u[idx]);
            let g2 = g * g;
            let q = du.iter().map(|v| v * v).sum::<f64>() / g2;
            if !(q < 1.0) {
                return Err(spacelike_error(
                    grid,
                    idx,
                    format!("not spacelike: |Du|²/g² = {q}"),
                ));
            }
            let w = (1.0 - q).sqrt();
            let mut normal = Vec::with_capacity(n + 1);
            normal.push(s / w);
            normal.extend(du.iter().map(|ui| s * ui / (g2 * w)));
            Ok(Some(RingData { du, normal }))
        })
        .collect::<Result<_>>()?;

    let metric_at = |idx: usize| -> DMatrix<f64> {
        let du = &ring[idx].as_ref().expect("ring node").du;
        let g = warp.value(u[idx]);
        DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { g * g } else { 0.0 };
            d - du[i] * du[j]
        })
    };

    let interior = grid.interior(HALO);
    let nodes = interior
        .par_iter()
        .map(|&idx| node_frame(graph, &ring, &metric_at, idx))
        .collect::<Result<Vec<_>>>()?;

    Ok(FrameData {
        ambient: graph.ambient,
        grid: grid.clone(),
        heights: u.clone(),
        orientation,
        nodes,
    })
}

fn node_frame(
    graph: &GraphHypersurface,
    ring: &[Option<RingData>],
    metric_at: &(dyn Fn(usize) -> DMatrix<f64> + Sync),
    idx: usize,
) -> Result<NodeFrame> {
    let grid = &graph.grid;
    let n = grid.dim();
    let warp = graph.ambient.warp;
    let height = graph.heights[idx];
    let here = ring[idx].as_ref().expect("interior node is in the ring");
    let du = here.du.clone();
    let nv = &here.normal;
    let g = warp.value(height);
    let g1 = warp.d1(height);
    let g2 = g * g;
    let lg = g1 / g;

    let metric = metric_at(idx);
    let chol = Cholesky::new(metric.clone()).ok_or_else(|| {
        spacelike_error(grid, idx, "induced metric is not positive definite".into())
    })?;
    let metric_inv = chol.inverse();
    let chol_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Numeric("singular Cholesky factor".into()))?;

    let dmetric: Vec<DMatrix<f64>> = (0..n)
        .map(|l| {
            let st = grid.stride(l);
            (metric_at(idx + st) - metric_at(idx - st)) / (2.0 * grid.spacing()[l])
        })
        .collect();
    let christoffel: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                0.5 * (0..n)
                    .map(|l| {
                        metric_inv[(k, l)]
                            * (dmetric[i][(j, l)] + dmetric[j][(i, l)] - dmetric[l][(i, j)])
                    })
                    .sum::<f64>()
            })
        })
        .collect();

    let normal_norm = -nv[0] * nv[0] + g2 * nv[1..].iter().map(|v| v * v).sum::<f64>();
    let tangency_defect = (0..n)
        .map(|i| (-nv[0] * du[i] + g2 * nv[1 + i]).abs())
        .fold(0.0, f64::max);

    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        let st = grid.stride(i);
        let plus = &ring[idx + st].as_ref().expect("ring neighbour").normal;
        let minus = &ring[idx - st].as_ref().expect("ring neighbour").normal;
        let dn: Vec<f64> = (0..=n)
            .map(|a| (plus[a] - minus[a]) / (2.0 * grid.spacing()[i]))
            .collect();
        let v0 = dn[0] + g * g1 * nv[1 + i];
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let vj = dn[1 + j] + lg * (du[i] * nv[1 + j] + delta * nv[0]);
            b[(i, j)] = v0 * du[j] - g2 * vj;
        }
    }
    let scale = b.amax().max(f64::MIN_POSITIVE);
    let asymmetry = (&b - b.transpose()).amax() / scale;
    let second_fundamental = (&b + b.transpose()) * 0.5;

    let shape = SymMatrix::symmetrized(&(&chol_inv * &second_fundamental * chol_inv.transpose()));
    let principal = shape.eigenvalues()?;
    let sym = elementary_symmetric(&principal);
    let newton = newton_transforms_from_sym(&shape, &sym);
    let invariants = CurvatureInvariants::from_elem_sym(sym);

    Ok(NodeFrame {
        index: idx,
        height,
        du,
        warp: g,
        warp_d1: g1,
        log_derivative: warp.log_derivative(height),
        metric,
        metric_inv,
        chol_inv,
        christoffel,
        normal: nv.clone(),
        normal_dot_dt: -nv[0],
        normal_norm,
        tangency_defect,
        second_fundamental,
        asymmetry,
        shape,
        principal,
        invariants,
        newton,
    })
}

/// Curvature data at one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureRow {
    pub index: usize,
    pub node: Vec<usize>,
    pub coords: Vec<f64>,
    pub principal: Vec<f64>,
    pub invariants: CurvatureInvariants,
    /// Scalar curvature from the Gauss equation, when the ambient curvature
    /// is constant.
    pub scalar_curvature: Option<f64>,
    /// `Σ_{i≠j} (c - λ_i λ_j) - n(n-1)(c - H_2)`
    pub gauss_residual: Option<f64>,
}

pub fn curvature_report(frames: &FrameData) -> Result<Vec<CurvatureRow>> {
    let c = match frames.ambient.ambient_curvature() {
        AmbientCurvature::Constant(c) => Some(c),
        AmbientCurvature::NonConstant => None,
    };
    frames
        .nodes
        .par_iter()
        .map(|f| {
            let (scalar_curvature, gauss_residual) = match c {
                Some(c) => {
                    let data = gauss_curvature_data(&Spectrum::new(f.principal.clone())?, c)?;
                    (
                        Some(data.scalar_curvature),
                        Some(data.pairwise_sum - data.scalar_curvature),
                    )
                }
                None => (None, None),
            };
            Ok(CurvatureRow {
                index: f.index,
                node: frames.grid.multi_index(f.index),
                coords: frames.grid.coords(f.index),
                principal: f.principal.clone(),
                invariants: f.invariants.clone(),
                scalar_curvature,
                gauss_residual,
            })
        })
        .collect()
}
