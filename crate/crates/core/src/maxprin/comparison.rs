use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{range, Result};

/// Comparison data at distance `t` for curvature bound `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonValues {
    /// `s_c(t)`: `sinh(at)/(at)`, `t` or `sin(at)/(at)`.
    pub s: f64,
    /// `s_c'(t)`
    pub ds: f64,
    /// `s_c'(t) s_c(t)`, the Hessian bound per unit trace built from `s_c`.
    pub literal_bound: f64,
    /// `sn_c'(t) / sn_c(t)` with `sn_c = sinh(at)/a, t, sin(at)/a`; the
    /// classical Hessian comparison bound orthogonal to `∇ρ`.
    pub standard_bound: f64,
}

const SERIES_CUTOFF: f64 = 1e-3;

/// `s_c`, its derivative and both Hessian bounds at `t > 0`.
///
/// For `c > 0` the argument must satisfy `t ≤ π/√c`; at the endpoint the
/// standard bound is `-∞`.
pub fn comparison_functions(t: f64, c: f64) -> Result<ComparisonValues> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(range(format!("distance t = {t} must be positive and finite")));
    }
    if !c.is_finite() {
        return Err(range("curvature bound must be finite"));
    }
    let a = c.abs().sqrt();
    let x = a * t;
    if c > 0.0 && x > PI * (1.0 + 1e-15) {
        return Err(range(format!("t = {t} beyond the conjugate radius π/√c = {}", PI / a)));
    }
    let (s, ds, standard_bound) = if c == 0.0 {
        (t, 1.0, 1.0 / t)
    } else if c < 0.0 {
        let (s, ds) = if x < SERIES_CUTOFF {
            let x2 = x * x;
            (
                1.0 + x2 / 6.0 + x2 * x2 / 120.0,
                a * (x / 3.0 + x * x2 / 30.0 + x * x2 * x2 / 840.0),
            )
        } else {
            (x.sinh() / x, (x * x.cosh() - x.sinh()) / (a * t * t))
        };
        (s, ds, a / x.tanh())
    } else {
        let (s, ds) = if x < SERIES_CUTOFF {
            let x2 = x * x;
            (
                1.0 - x2 / 6.0 + x2 * x2 / 120.0,
                a * (-x / 3.0 + x * x2 / 30.0 - x * x2 * x2 / 840.0),
            )
        } else {
            (x.sin() / x, (x * x.cos() - x.sin()) / (a * t * t))
        };
        let standard = if x >= PI { f64::NEG_INFINITY } else { a / x.tan() };
        (s, ds, standard)
    };
    Ok(ComparisonValues {
        s,
        ds,
        literal_bound: ds * s,
        standard_bound,
    })
}
