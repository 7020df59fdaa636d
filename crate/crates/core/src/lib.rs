//! Numerical verification of the curvature apparatus of spacelike
//! hypersurfaces in generalized Robertson–Walker spacetimes.
//!
//! - [`symfunc`]: symmetric functions, mean curvatures, Newton transformations.
//! - [`grw`]: discretised spacelike graphs in warped products.
//! - [`square`]: the operators `L_r` and `□ = tr(Φ Hess ·)`.
//! - [`maxprin`]: model manifolds and the Omori–Yau style maximum principle.
//! - [`cli`]: configurable suites and audits with JSON/CSV output.

pub mod cli;
pub mod error;
pub mod grw;
pub mod maxprin;
pub mod square;
pub mod symfunc;

pub use error::{Error, Result};
