//! Spacelike graphs `t = u(x)` in warped products `-I ×_g ℝ^n`.
//!
//! All derivatives are second-order central differences on a uniform grid;
//! reports cover nodes at least [`HALO`] nodes from the boundary.

mod frames;
mod grid;
mod io;
mod operators;
mod surface;
mod warp;

pub use frames::{build_frames, curvature_report, CurvatureRow, FrameData, NodeFrame, Orientation};
pub use grid::{Grid, HALO};
pub use io::{GraphSpec, GridSpec, HeightSpec};
pub use operators::{
    elliptic_point_scan, height_gradient, intrinsic_hessian, lr_compose_verify, lr_height_formula,
    lr_height_verify, EllipticScan, ExpProfile, HeightGradientNode, HeightGradientReport,
    IdentityProfile, MinimumCheck, NodeHessian, Profile, ResidualNode, ResidualReport,
    SquareProfile,
};
pub use surface::{GraphHypersurface, HeightFamily, Jet};
pub use warp::{AmbientCurvature, Warp, WarpedProduct};
