use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::warp::WarpedProduct;
use crate::error::{config, Error, Result};

/// Closed-form height functions `u(x)` with analytic derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HeightFamily {
    /// `u ≡ t0`
    Slice { t0: f64 },
    /// `t0 + a Π_d cos(k_d x_d)`
    Trig { t0: f64, amplitude: f64, wavenumbers: Vec<f64> },
    /// `t0 + a exp(-|x - c|² / w²)`
    Bump { t0: f64, amplitude: f64, width: f64, center: Vec<f64> },
    /// `t0 + κ|x|²`
    Bowl { t0: f64, curvature: f64 },
    /// `t0 - κ|x|²`
    Cap { t0: f64, curvature: f64 },
    /// `t0 + s x_axis`
    Ramp { t0: f64, slope: f64, axis: usize },
    /// `t0 + a Σ_m c_m cos(k_m·x + θ_m)`, modes drawn from `seed`.
    RandomTrig { t0: f64, amplitude: f64, modes: usize, seed: u64 },
}

/// Value, gradient and Hessian of a height function at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

struct Mode {
    k: Vec<f64>,
    phase: f64,
    coeff: f64,
}

fn random_modes(n: usize, count: usize, seed: u64) -> Vec<Mode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Mode {
            k: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
            coeff: rng.random_range(-1.0..1.0) / count as f64,
        })
        .collect()
}

impl HeightFamily {
    pub fn base_height(&self) -> f64 {
        match *self {
            HeightFamily::Slice { t0 }
            | HeightFamily::Trig { t0, .. }
            | HeightFamily::Bump { t0, .. }
            | HeightFamily::Bowl { t0, .. }
            | HeightFamily::Cap { t0, .. }
            | HeightFamily::Ramp { t0, .. }
            | HeightFamily::RandomTrig { t0, .. } => t0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match self {
            HeightFamily::Trig { wavenumbers, .. } => wavenumbers.len() == n,
            HeightFamily::Bump { center, width, .. } => center.len() == n && *width > 0.0,
            HeightFamily::Ramp { axis, .. } => *axis < n,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(config(format!("height family {self:?} does not fit dimension {n}")))
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        let n = x.len();
        let mut gradient = vec![0.0; n];
        let mut hessian = DMatrix::zeros(n, n);
        let value = match self {
            HeightFamily::Slice { t0 } => *t0,
            HeightFamily::Trig { t0, amplitude, wavenumbers } => {
                let c: Vec<f64> = (0..n).map(|d| (wavenumbers[d] * x[d]).cos()).collect();
                let s: Vec<f64> = (0..n).map(|d| (wavenumbers[d] * x[d]).sin()).collect();
                let prod_except = |skip: &[usize]| -> f64 {
                    (0..n).filter(|d| !skip.contains(d)).map(|d| c[d]).product()
                };
                for i in 0..n {
                    let ki = wavenumbers[i];
                    gradient[i] = -amplitude * ki * s[i] * prod_except(&[i]);
                    hessian[(i, i)] = -amplitude * ki * ki * c[i] * prod_except(&[i]);
                    for j in 0..i {
                        let v = amplitude * ki * wavenumbers[j] * s[i] * s[j] * prod_except(&[i, j]);
                        hessian[(i, j)] = v;
                        hessian[(j, i)] = v;
                    }
                }
                t0 + amplitude * prod_except(&[])
            }
            HeightFamily::Bump { t0, amplitude, width, center } => {
                let w2 = width * width;
                let y: Vec<f64> = (0..n).map(|d| x[d] - center[d]).collect();
                let e = amplitude * (-y.iter().map(|v| v * v).sum::<f64>() / w2).exp();
                for i in 0..n {
                    gradient[i] = -2.0 * y[i] / w2 * e;
                    for j in 0..n {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        hessian[(i, j)] = (4.0 * y[i] * y[j] / (w2 * w2) - 2.0 * delta / w2) * e;
                    }
                }
                t0 + e
            }
            HeightFamily::Bowl { t0, curvature } | HeightFamily::Cap { t0, curvature } => {
                let k = if matches!(self, HeightFamily::Cap { .. }) {
                    -curvature
                } else {
                    *curvature
                };
                for i in 0..n {
                    gradient[i] = 2.0 * k * x[i];
                    hessian[(i, i)] = 2.0 * k;
                }
                t0 + k * x.iter().map(|v| v * v).sum::<f64>()
            }
            HeightFamily::Ramp { t0, slope, axis } => {
                gradient[*axis] = *slope;
                t0 + slope * x[*axis]
            }
            HeightFamily::RandomTrig { t0, amplitude, modes, seed } => {
                let mut v = *t0;
                for m in random_modes(n, *modes, *seed) {
                    let arg: f64 = m.k.iter().zip(x).map(|(k, xi)| k * xi).sum::<f64>() + m.phase;
                    let a = amplitude * m.coeff;
                    v += a * arg.cos();
                    for i in 0..n {
                        gradient[i] -= a * m.k[i] * arg.sin();
                        for j in 0..n {
                            hessian[(i, j)] -= a * m.k[i] * m.k[j] * arg.cos();
                        }
                    }
                }
                v
            }
        };
        Jet {
            value,
            gradient,
            hessian,
        }
    }
}

/// A graph `t = u(x)` over a grid in the fiber of a warped product.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphHypersurface {
    pub ambient: WarpedProduct,
    pub grid: Grid,
    pub heights: Vec<f64>,
}

impl GraphHypersurface {
    pub fn new(ambient: WarpedProduct, grid: Grid, heights: Vec<f64>) -> Result<Self> {
        if grid.dim() != ambient.fiber_dim {
            return Err(config(format!(
                "grid dimension {} differs from fiber dimension {}",
                grid.dim(),
                ambient.fiber_dim
            )));
        }
        if heights.len() != grid.len() {
            return Err(config(format!(
                "{} height values for {} grid nodes",
                heights.len(),
                grid.len()
            )));
        }
        if let Some(i) = heights.iter().position(|&t| !ambient.contains(t)) {
            return Err(Error::Geometry {
                node: grid.multi_index(i),
                coords: grid.coords(i),
                reason: format!("height {} outside the interval {:?}", heights[i], ambient.interval),
            });
        }
        Ok(Self {
            ambient,
            grid,
            heights,
        })
    }

    pub fn from_family(ambient: WarpedProduct, grid: Grid, family: &HeightFamily) -> Result<Self> {
        family.validate(grid.dim())?;
        let heights = grid.sample(|x| family.value(x));
        Self::new(ambient, grid, heights)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_jet(f: &HeightFamily, x: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let n = x.len();
        let h = 1e-4;
        let shifted = |i: usize, s: f64| {
            let mut y = x.to_vec();
            y[i] += s;
            y
        };
        let grad = (0..n)
            .map(|i| (f.value(&shifted(i, h)) - f.value(&shifted(i, -h))) / (2.0 * h))
            .collect();
        let hess = DMatrix::from_fn(n, n, |i, j| {
            let gi = |y: &[f64]| f.jet(y).gradient[i];
            (gi(&shifted(j, h)) - gi(&shifted(j, -h))) / (2.0 * h)
        });
        (grad, hess)
    }

    #[test]
    fn analytic_jets_match_differences() {
        let fams = [
            HeightFamily::Trig { t0: 0.3, amplitude: 0.2, wavenumbers: vec![1.0, 2.0, 0.5] },
            HeightFamily::Bump { t0: 0.0, amplitude: 0.4, width: 0.7, center: vec![0.1, -0.2, 0.3] },
            HeightFamily::Bowl { t0: 1.0, curvature: 0.3 },
            HeightFamily::Cap { t0: 1.0, curvature: 0.3 },
            HeightFamily::Ramp { t0: 0.0, slope: 0.5, axis: 2 },
            HeightFamily::RandomTrig { t0: 0.0, amplitude: 0.3, modes: 4, seed: 9 },
        ];
        let x = [0.3, -0.4, 0.8];
        for f in &fams {
            let jet = f.jet(&x);
            let (g, h) = fd_jet(f, &x);
            for i in 0..3 {
                assert!((jet.gradient[i] - g[i]).abs() < 1e-7, "{f:?}");
            }
            assert!((&jet.hessian - h).amax() < 1e-6, "{f:?}");
        }
    }

    #[test]
    fn heights_outside_interval_name_the_node() {
        let amb = WarpedProduct::new(2, super::super::Warp::Power { exponent: 1.0 }, None).unwrap();
        let grid = Grid::cube(2, -1.0, 1.0, 6).unwrap();
        let err = GraphHypersurface::from_family(amb, grid, &HeightFamily::Ramp { t0: 0.5, slope: 1.0, axis: 0 })
            .unwrap_err();
        assert!(matches!(err, Error::Geometry { .. }));
    }
}
