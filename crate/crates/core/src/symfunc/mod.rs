//! Elementary symmetric functions of principal curvatures, higher-order mean
//! curvatures and Newton transformations.
//!
//! Two sign conventions coexist in this module and are deliberately kept under
//! different names:
//!
//! - [`mean_curvature`] is the immersion-facing `H_r = (-1)^r S_r / C(n, r)`,
//!   used everywhere a shape operator is involved;
//! - [`newton_maclaurin_check`] works with the unsigned normalisation
//!   `S_r / C(n, r)` for which the classical Newton and Maclaurin
//!   inequalities are stated.
//!
//! All routines are generic over [`Scalar`] where exact rational arithmetic is
//! useful (equality cases of the inequalities, the Gauss identity); matrix
//! routines are `f64` only.

mod gauss;
mod inequalities;
mod newton;
mod scalar;
mod spectrum;

pub use gauss::{gauss_curvature_data, gauss_curvature_exact, GaussCurvature, SectionalCurvature};
pub use inequalities::{
    newton_maclaurin_check, ChainVerdict, NewtonGap, NewtonMaclaurinVerdict, VanishingCheck,
};
pub use newton::{
    newton_transform, newton_transforms, newton_transforms_from_sym, trace_identities,
    Comparison, TraceReport, TraceRow,
};
pub use scalar::{rational, Scalar};
pub use spectrum::{
    binomial, elem_sym, elementary_symmetric, mean_curvature, restricted_sym,
    CurvatureInvariants, Spectrum, SymMatrix, MAX_DIM,
};
