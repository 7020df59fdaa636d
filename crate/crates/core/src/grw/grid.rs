use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{config, Result};

/// Nodes excluded at every face of the grid: one ring for the normal
/// stencil and one for differentiating it.
pub const HALO: usize = 2;

const MAX_NODES: usize = 20_000_000;

/// Uniform rectangular lattice over a box in `ℝ^n`. Axis 0 varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    lower: Vec<f64>,
    spacing: Vec<f64>,
    nodes: Vec<usize>,
    #[serde(skip)]
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(lower: Vec<f64>, spacing: Vec<f64>, nodes: Vec<usize>) -> Result<Self> {
        let n = lower.len();
        if n == 0 || spacing.len() != n || nodes.len() != n {
            return Err(config("grid lower/spacing/nodes must have the same non-zero length"));
        }
        if spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(config("grid spacing must be positive and finite"));
        }
        if lower.iter().any(|v| !v.is_finite()) {
            return Err(config("grid origin must be finite"));
        }
        let min_nodes = 2 * HALO + 1;
        if let Some(k) = nodes.iter().position(|&m| m < min_nodes) {
            return Err(config(format!(
                "axis {k} has {} nodes; the stencils need at least {min_nodes}",
                nodes[k]
            )));
        }
        let total = nodes.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m));
        if total.is_none_or(|t| t > MAX_NODES) {
            return Err(config(format!("grid larger than {MAX_NODES} nodes")));
        }
        let mut strides = vec![1; n];
        for d in 1..n {
            strides[d] = strides[d - 1] * nodes[d - 1];
        }
        Ok(Self {
            lower,
            spacing,
            nodes,
            strides,
        })
    }

    /// Grid with `nodes[d]` points spanning `[lower[d], upper[d]]`.
    pub fn from_extents(lower: Vec<f64>, upper: Vec<f64>, nodes: Vec<usize>) -> Result<Self> {
        if upper.len() != lower.len() || nodes.len() != lower.len() {
            return Err(config("grid extents and node counts differ in length"));
        }
        let spacing = lower
            .iter()
            .zip(&upper)
            .zip(&nodes)
            .map(|((lo, hi), &m)| (hi - lo) / (m.max(2) - 1) as f64)
            .collect();
        Self::new(lower, spacing, nodes)
    }

    /// Cube `[lo, hi]^n` with `m` nodes per axis.
    pub fn cube(n: usize, lo: f64, hi: f64, m: usize) -> Result<Self> {
        Self::from_extents(vec![lo; n], vec![hi; n], vec![m; n])
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .map(|&m| {
                let i = idx % m;
                idx /= m;
                i
            })
            .collect()
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(d, &i)| self.lower[d] + i as f64 * self.spacing[d])
            .collect()
    }

    /// Whether the node is at least `margin` nodes away from every face.
    pub fn within(&self, idx: usize, margin: usize) -> bool {
        self.multi_index(idx)
            .iter()
            .zip(&self.nodes)
            .all(|(&i, &m)| i >= margin && i + margin < m)
    }

    /// All nodes at least `margin` away from every face, in index order.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.within(i, margin)).collect()
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i))).collect()
    }

    /// Second-order central first derivatives of `f` at `idx`.
    pub fn gradient(&self, f: &[f64], idx: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|d| {
                let s = self.strides[d];
                (f[idx + s] - f[idx - s]) / (2.0 * self.spacing[d])
            })
            .collect()
    }

    /// Second-order central second derivatives `∂_i ∂_j f` at `idx`.
    pub fn second_derivatives(&self, f: &[f64], idx: usize) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let (si, hi) = (self.strides[i], self.spacing[i]);
            m[(i, i)] = (f[idx + si] - 2.0 * f[idx] + f[idx - si]) / (hi * hi);
            for j in 0..i {
                let (sj, hj) = (self.strides[j], self.spacing[j]);
                let v = (f[idx + si + sj] - f[idx + si - sj] - f[idx - si + sj]
                    + f[idx - si - sj])
                    / (4.0 * hi * hj);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Nodes of the `3^n - 1` neighbourhood of an interior node.
    pub fn neighbours(&self, idx: usize) -> Vec<usize> {
        let n = self.dim();
        let mut out = Vec::with_capacity(3usize.pow(n as u32) - 1);
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut offset = 0isize;
            for d in 0..n {
                let step = (c % 3) as isize - 1;
                c /= 3;
                offset += step * self.strides[d] as isize;
            }
            if offset != 0 {
                out.push((idx as isize + offset) as usize);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let g = Grid::from_extents(vec![0.0, -1.0, 2.0], vec![1.0, 1.0, 3.0], vec![5, 6, 7]).unwrap();
        for idx in [0, 17, 100, g.len() - 1] {
            assert_eq!(g.linear_index(&g.multi_index(idx)), idx);
        }
        assert_eq!(g.coords(0), vec![0.0, -1.0, 2.0]);
        assert_eq!(g.interior(HALO).len(), 1 * 2 * 3);
        assert_eq!(g.neighbours(g.interior(HALO)[0]).len(), 26);
    }

    #[test]
    fn too_small_for_stencils() {
        assert!(matches!(
            Grid::cube(2, 0.0, 1.0, 4),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn central_differences_are_exact_on_quadratics() {
        let g = Grid::cube(2, -1.0, 1.0, 9).unwrap();
        let f = g.sample(|x| 3.0 * x[0] * x[0] - 2.0 * x[0] * x[1] + x[1]);
        let idx = g.linear_index(&[4, 5]);
        let x = g.coords(idx);
        let grad = g.gradient(&f, idx);
        assert!((grad[0] - (6.0 * x[0] - 2.0 * x[1])).abs() < 1e-12);
        assert!((grad[1] - (-2.0 * x[0] + 1.0)).abs() < 1e-12);
        let h = g.second_derivatives(&f, idx);
        assert!((h[(0, 0)] - 6.0).abs() < 1e-10);
        assert!((h[(0, 1)] + 2.0).abs() < 1e-10);
        assert!(h[(1, 1)].abs() < 1e-10);
    }
}
