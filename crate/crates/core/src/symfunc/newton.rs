use nalgebra::DMatrix;
use serde::Serialize;

use super::spectrum::{elementary_symmetric, CurvatureInvariants, SymMatrix};
use crate::error::{range, Result};

/// Newton transformations `P_0, …, P_n` of `a`, with `S_r` taken from the
/// eigenvalues of `a`.
pub fn newton_transforms(a: &SymMatrix) -> Result<Vec<SymMatrix>> {
    let s = elementary_symmetric(&a.eigenvalues()?);
    Ok(newton_transforms_from_sym(a, &s))
}

/// `P_0 = I`, `P_r = (-1)^r S_r I + A P_{r-1}` given precomputed `S_0..=S_n`.
///
/// Each step is re-symmetrised; in exact arithmetic `A P_{r-1}` is already
/// symmetric because `P_{r-1}` is a polynomial in `A`.
pub fn newton_transforms_from_sym(a: &SymMatrix, s: &[f64]) -> Vec<SymMatrix> {
    let n = a.dim();
    debug_assert_eq!(s.len(), n + 1);
    let mut out = Vec::with_capacity(n + 1);
    out.push(SymMatrix::identity(n));
    for r in 1..=n {
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let m = DMatrix::identity(n, n) * (sign * s[r]) + a.as_matrix() * out[r - 1].as_matrix();
        out.push(SymMatrix::symmetrized(&m));
    }
    out
}

/// The `r`-th Newton transformation of `a`.
pub fn newton_transform(a: &SymMatrix, r: usize) -> Result<SymMatrix> {
    let n = a.dim();
    if r > n {
        return Err(range(format!("order r = {r} outside 0..={n}")));
    }
    Ok(newton_transforms(a)?.swap_remove(r))
}

/// A computed quantity next to its closed form.
///
/// `scale` bounds the magnitude of the terms on both sides: the closed form
/// evaluated on `|λ_i|`, and the expansion of the trace in powers of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub computed: f64,
    pub closed_form: f64,
    pub scale: f64,
    pub relative_residual: f64,
}

impl Comparison {
    pub fn new(computed: f64, closed_form: f64, scale: f64) -> Self {
        let diff = (computed - closed_form).abs();
        let relative_residual = if diff == 0.0 {
            0.0
        } else {
            diff / scale.max(f64::MIN_POSITIVE)
        };
        Self {
            computed,
            closed_form,
            scale,
            relative_residual,
        }
    }

    pub fn within(&self, tol: f64) -> bool {
        self.relative_residual <= tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub r: usize,
    /// `tr(P_r)` against `b_r H_r`.
    pub trace_p: Comparison,
    /// `tr(A P_r)` against `-b_r H_{r+1}`.
    pub trace_ap: Comparison,
    /// `tr(A² P_r)` against `(-1)^r (S_1 S_{r+1} - (r+2) S_{r+2})`.
    pub trace_a2p: Comparison,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub rows: Vec<TraceRow>,
    /// Largest entry of `P_n` in absolute value.
    pub pn_max_abs: f64,
    /// `‖A‖_∞^n`, the unit in which `P_n` is measured.
    pub pn_unit: f64,
}

impl TraceReport {
    pub fn worst_relative(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| [r.trace_p, r.trace_ap, r.trace_a2p])
            .map(|c| c.relative_residual)
            .fold(0.0, f64::max)
    }

    /// `P_n = 0` within `factor · ‖A‖_∞^n`.
    pub fn pn_vanishes(&self, factor: f64) -> bool {
        self.pn_max_abs <= factor * self.pn_unit
    }
}

/// Evaluates `tr(P_r)`, `tr(A P_r)` and `tr(A² P_r)` for every `0 ≤ r < n`
/// by matrix products and compares them with their closed forms.
pub fn trace_identities(a: &SymMatrix) -> Result<TraceReport> {
    let n = a.dim();
    let eigenvalues = a.eigenvalues()?;
    let s = elementary_symmetric(&eigenvalues);
    let abs: Vec<f64> = eigenvalues.iter().map(|v| v.abs()).collect();
    let m = elementary_symmetric(&abs);
    let inv = CurvatureInvariants::from_elem_sym(s.clone());
    let p = newton_transforms_from_sym(a, &s);

    let am = a.as_matrix();
    let a2 = am * am;
    let s_at = |k: usize| s.get(k).copied().unwrap_or(0.0);
    let m_at = |k: usize| m.get(k).copied().unwrap_or(0.0);
    // Σ_k |S|_{r-k} Σ_i |λ_i|^{k+j}: majorant of tr(A^j P_r) expanded in powers of A.
    let power_sum = |e: usize| abs.iter().map(|v| v.powi(e as i32)).sum::<f64>();
    let expanded = |r: usize, j: usize| (0..=r).map(|k| m_at(r - k) * power_sum(k + j)).sum::<f64>();

    let rows = (0..n)
        .map(|r| {
            let pr = p[r].as_matrix();
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            let b = inv.b[r];
            TraceRow {
                r,
                trace_p: Comparison::new(pr.trace(), b * inv.h[r], ((n - r) as f64 * m_at(r)).max(expanded(r, 0))),
                trace_ap: Comparison::new(
                    (am * pr).trace(),
                    -b * inv.h[r + 1],
                    ((r + 1) as f64 * m_at(r + 1)).max(expanded(r, 1)),
                ),
                trace_a2p: Comparison::new(
                    (&a2 * pr).trace(),
                    sign * (s_at(1) * s_at(r + 1) - (r + 2) as f64 * s_at(r + 2)),
                    (m_at(1) * m_at(r + 1) + (r + 2) as f64 * m_at(r + 2)).max(expanded(r, 2)),
                ),
            }
        })
        .collect();

    Ok(TraceReport {
        n,
        eigenvalues,
        rows,
        pn_max_abs: p[n].max_abs(),
        pn_unit: a.norm_inf().powi(n as i32),
    })
}
