use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::model::{ModelKind, ModelManifold};
use super::sequence::{
    corollary_limits, corollary_limits_below, omori_yau_sequence, CorollaryVerdict, OmoriYauRun, SearchConfig,
};
use super::testfn::{FunctionFamily, TestFunction};
use crate::error::{config, Result};
use crate::symfunc::SymMatrix;

/// Constant `Φ`, either diagonal or as a full row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiSpec {
    Diagonal(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl PhiSpec {
    pub fn build(&self, dim: usize) -> Result<SymMatrix> {
        match self {
            PhiSpec::Diagonal(d) if d.len() == dim => Ok(SymMatrix::from_diagonal(d)),
            PhiSpec::Matrix(rows) if rows.len() == dim && rows.iter().all(|r| r.len() == dim) => {
                let m = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
                SymMatrix::new(m)
            }
            _ => Err(config(format!("Φ does not have dimension {dim}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: ModelKind,
    #[serde(default)]
    pub curvature: f64,
    pub dim: usize,
    #[serde(default)]
    pub base_point: Option<Vec<f64>>,
    pub function: FunctionFamily,
    pub phi: PhiSpec,
    pub k_max: usize,
    #[serde(default)]
    pub search: SearchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub above: OmoriYauRun,
    pub above_verdict: CorollaryVerdict,
    pub below: OmoriYauRun,
    pub below_verdict: CorollaryVerdict,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        let runs = [&self.above, &self.below];
        runs.iter().all(|r| {
            r.unresolved.is_empty()
                && r.max_gradient_residual() <= 1e-6
                && r.records.iter().all(|rec| rec.square_bound_holds)
        }) && self.above_verdict.holds
    }
}

impl Scenario {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Runs the sequence for `f` and for `-f`, with both corollary verdicts.
    ///
    /// The bounded-below verdict is only meaningful when `f` is bounded
    /// below; the run on `-f` is reported either way.
    pub fn run(&self) -> Result<ScenarioReport> {
        let model = ModelManifold::new(self.model, self.curvature, self.dim, self.base_point.clone())?;
        let phi = self.phi.build(self.dim)?;
        let f = TestFunction::new(self.function.clone(), &model)?;
        let neg = f.negate();
        let above = omori_yau_sequence(&model, &f, &phi, self.k_max, &self.search)?;
        let below = omori_yau_sequence(&model, &neg, &phi, self.k_max, &self.search)?;
        let above_verdict = corollary_limits(&above, f.supremum(&model).0);
        let below_verdict = corollary_limits_below(&below, f.infimum(&model).0);
        Ok(ScenarioReport {
            scenario: self.clone(),
            above,
            above_verdict,
            below,
            below_verdict,
        })
    }
}
