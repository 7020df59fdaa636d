use std::path::Path;

use serde::{Deserialize, Serialize};

use super::frames::Orientation;
use super::grid::Grid;
use super::surface::{GraphHypersurface, HeightFamily};
use super::warp::{Warp, WarpedProduct};
use crate::error::{config, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    #[serde(default)]
    pub upper: Option<Vec<f64>>,
    #[serde(default)]
    pub spacing: Option<Vec<f64>>,
    pub nodes: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        match (&self.upper, &self.spacing) {
            (Some(upper), None) => {
                Grid::from_extents(self.lower.clone(), upper.clone(), self.nodes.clone())
            }
            (None, Some(spacing)) => Grid::new(self.lower.clone(), spacing.clone(), self.nodes.clone()),
            _ => Err(config("grid needs exactly one of `upper` or `spacing`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HeightSpec {
    Values { values: Vec<f64> },
    Family(HeightFamily),
}

/// JSON description of a graph hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub fiber_dim: usize,
    pub grid: GridSpec,
    #[serde(default = "default_warp")]
    pub warp: Warp,
    #[serde(default)]
    pub interval: Option<(f64, f64)>,
    pub height: HeightSpec,
    #[serde(default = "default_orientation")]
    pub orientation: Orientation,
}

fn default_warp() -> Warp {
    Warp::SteadyState
}

fn default_orientation() -> Orientation {
    Orientation::Same
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<GraphHypersurface> {
        let ambient = WarpedProduct::new(self.fiber_dim, self.warp, self.interval)?;
        let grid = self.grid.build()?;
        match &self.height {
            HeightSpec::Values { values } => GraphHypersurface::new(ambient, grid, values.clone()),
            HeightSpec::Family(f) => GraphHypersurface::from_family(ambient, grid, f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_family_and_values() {
        let spec = GraphSpec::from_json(
            r#"{"fiber_dim": 2,
                "grid": {"lower": [0, 0], "upper": [1, 1], "nodes": [6, 6]},
                "height": {"family": "bowl", "t0": 0.5, "curvature": 0.1},
                "orientation": "opposite"}"#,
        )
        .unwrap();
        assert_eq!(spec.orientation, Orientation::Opposite);
        let g = spec.build().unwrap();
        assert_eq!(g.heights.len(), 36);

        let spec = GraphSpec::from_json(
            r#"{"fiber_dim": 2, "warp": {"kind": "cosh"},
                "grid": {"lower": [0, 0], "spacing": [0.1, 0.1], "nodes": [5, 5]},
                "height": {"values": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                      0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                      0.0, 0.0, 0.0, 0.0, 0.0]}}"#,
        )
        .unwrap();
        assert!(spec.build().is_ok());
    }

    #[test]
    fn rejects_ambiguous_grid() {
        let spec = GraphSpec::from_json(
            r#"{"fiber_dim": 2,
                "grid": {"lower": [0, 0], "upper": [1, 1], "spacing": [0.1, 0.1], "nodes": [6, 6]},
                "height": {"family": "slice", "t0": 0.0}}"#,
        )
        .unwrap();
        assert!(matches!(spec.build(), Err(crate::Error::Config(_))));
    }
}
