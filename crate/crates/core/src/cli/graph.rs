use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::grw::{
    build_frames, curvature_report, elliptic_point_scan, lr_height_verify, CurvatureRow, EllipticScan, GraphSpec,
    Orientation, ResidualNode,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub dim: usize,
    pub orientation: Orientation,
    pub nodes: usize,
    pub rows: Vec<CurvatureRow>,
    pub elliptic: EllipticScan,
    /// `max |Σ K_ij - R|` when the ambient has constant curvature.
    pub max_gauss_residual: Option<f64>,
}

pub fn graph_report(spec: &GraphSpec) -> Result<GraphReport> {
    let graph = spec.build()?;
    let frames = build_frames(&graph, spec.orientation)?;
    let rows = curvature_report(&frames)?;
    let max_gauss_residual = rows
        .iter()
        .map(|r| r.gauss_residual.map(f64::abs))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)));
    Ok(GraphReport {
        dim: frames.dim(),
        orientation: spec.orientation,
        nodes: rows.len(),
        elliptic: elliptic_point_scan(&frames),
        max_gauss_residual,
        rows,
    })
}

/// One CSV line per node: coordinates, principal curvatures, `H_0..=H_n`, `R`.
pub fn write_curvature_csv(path: &Path, rows: &[CurvatureRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if let Some(first) = rows.first() {
        let n = first.coords.len();
        let mut header = vec!["index".to_string()];
        header.extend((0..n).map(|i| format!("x{i}")));
        header.extend((0..n).map(|i| format!("k{i}")));
        header.extend((0..=n).map(|r| format!("H{r}")));
        header.push("scalar_curvature".into());
        w.write_record(&header)?;
    }
    for row in rows {
        let mut rec = vec![row.index.to_string()];
        rec.extend(row.coords.iter().map(f64::to_string));
        rec.extend(row.principal.iter().map(f64::to_string));
        rec.extend(row.invariants.h.iter().map(f64::to_string));
        rec.push(row.scalar_curvature.map(|v| v.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrhReport {
    pub r: usize,
    pub max_residual: f64,
    pub max_formula: f64,
    /// `max_residual / max(1, max_formula)`
    pub relative: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub nodes: Vec<ResidualNode>,
}

/// `tr(P_r Hess h)` against its closed form on a graph file.
pub fn lrh_report(spec: &GraphSpec, r: usize, tolerance: f64) -> Result<LrhReport> {
    let graph = spec.build()?;
    let frames = build_frames(&graph, spec.orientation)?;
    let rep = lr_height_verify(&frames, r)?;
    let relative = rep.max_residual / rep.max_formula.max(1.0);
    Ok(LrhReport {
        r,
        max_residual: rep.max_residual,
        max_formula: rep.max_formula,
        relative,
        tolerance,
        passed: relative <= tolerance,
        nodes: rep.nodes,
    })
}
