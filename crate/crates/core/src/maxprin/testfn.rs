use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::ModelManifold;
use crate::error::{config, Result};

/// Closed-form test functions on a model chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionFamily {
    Constant { value: f64 },
    /// `-a / (1 + d(x, o)²)` with `o` the chart origin; sup `0`, not attained
    /// on non-compact models.
    InverseQuadratic { amplitude: f64 },
    /// `h exp(-|x - c|² / w²)` in chart coordinates.
    Gaussian { center: Vec<f64>, height: f64, width: f64 },
}

/// Value, coordinate differential and coordinate second partials.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionJet {
    pub value: f64,
    pub d1: DVector<f64>,
    pub d2: DMatrix<f64>,
}

/// A test function, optionally negated, validated against its model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub family: FunctionFamily,
    #[serde(default)]
    pub negated: bool,
}

const CROSS_CHECK_TOL: f64 = 1e-6;

impl TestFunction {
    /// Builds the function and cross-checks the analytic derivatives against
    /// central differences at a few chart points.
    pub fn new(family: FunctionFamily, model: &ModelManifold) -> Result<Self> {
        let f = Self {
            family,
            negated: false,
        };
        f.validate(model)?;
        Ok(f)
    }

    pub fn negate(&self) -> Self {
        Self {
            family: self.family.clone(),
            negated: !self.negated,
        }
    }

    pub fn validate(&self, model: &ModelManifold) -> Result<()> {
        let ok = match &self.family {
            FunctionFamily::Constant { value } => value.is_finite(),
            FunctionFamily::InverseQuadratic { amplitude } => amplitude.is_finite() && *amplitude > 0.0,
            FunctionFamily::Gaussian { center, height, width } => {
                center.len() == model.dim && height.is_finite() && *width > 0.0
            }
        };
        if !ok {
            return Err(config(format!("invalid test function {:?}", self.family)));
        }
        let n = model.dim;
        let radius = model.max_distance().min(2.0) * 0.6;
        let origin = vec![0.0; n];
        for (k, d) in [0.3, 0.7, 1.0].iter().enumerate() {
            let dir: Vec<f64> = (0..n).map(|i| ((i + k + 1) as f64).sin() + 0.1).collect();
            let mut x = model.point_at(&dir, d * radius);
            if x.iter().zip(&model.base_point).all(|(a, b)| a == b) {
                x = origin.clone();
            }
            let jet = self.jet(model, &x);
            let h = 1e-5;
            for i in 0..n {
                let mut a = x.clone();
                let mut b = x.clone();
                a[i] += h;
                b[i] -= h;
                let fd = (self.value(model, &a) - self.value(model, &b)) / (2.0 * h);
                let fd2 = (self.jet(model, &a).d1 - self.jet(model, &b).d1) / (2.0 * h);
                let scale = jet.d1.amax().max(jet.d2.amax()).max(1.0);
                if (fd - jet.d1[i]).abs() > CROSS_CHECK_TOL * scale
                    || (fd2 - jet.d2.column(i)).amax() > CROSS_CHECK_TOL * scale
                {
                    return Err(config(format!(
                        "analytic derivatives of {:?} disagree with differences at {x:?}",
                        self.family
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, model: &ModelManifold, x: &[f64]) -> f64 {
        self.jet(model, x).value
    }

    pub fn jet(&self, model: &ModelManifold, x: &[f64]) -> FunctionJet {
        let n = model.dim;
        let mut jet = match &self.family {
            FunctionFamily::Constant { value } => FunctionJet {
                value: *value,
                d1: DVector::zeros(n),
                d2: DMatrix::zeros(n, n),
            },
            FunctionFamily::InverseQuadratic { amplitude } => {
                // Radial about the chart origin: F(q) = -a/(1+q) with q = d(x, o)².
                let origin_model = ModelManifold {
                    base_point: vec![0.0; n],
                    ..model.clone()
                };
                let (q, dq, d2q) = squared_distance_jet(&origin_model, x);
                let inv = 1.0 / (1.0 + q);
                let f1 = amplitude * inv * inv;
                let f2 = -2.0 * amplitude * inv * inv * inv;
                FunctionJet {
                    value: -amplitude * inv,
                    d2: &dq * dq.transpose() * f2 + d2q * f1,
                    d1: dq * f1,
                }
            }
            FunctionFamily::Gaussian { center, height, width } => {
                let w2 = width * width;
                let y = DVector::from_iterator(n, x.iter().zip(center).map(|(a, b)| a - b));
                let e = height * (-y.norm_squared() / w2).exp();
                FunctionJet {
                    value: e,
                    d1: &y * (-2.0 * e / w2),
                    d2: (&y * y.transpose() * (4.0 / (w2 * w2)) - DMatrix::identity(n, n) * (2.0 / w2)) * e,
                }
            }
        };
        if self.negated {
            jet.value = -jet.value;
            jet.d1 = -jet.d1;
            jet.d2 = -jet.d2;
        }
        jet
    }

    /// `sup f` and whether it is attained, when known in closed form.
    pub fn supremum(&self, model: &ModelManifold) -> (f64, bool) {
        let compact = !model.cut_locus_free();
        match (&self.family, self.negated) {
            (FunctionFamily::Constant { value }, neg) => (if neg { -value } else { *value }, true),
            (FunctionFamily::InverseQuadratic { .. }, false) => (0.0, compact),
            (FunctionFamily::InverseQuadratic { amplitude }, true) => (*amplitude, true),
            (FunctionFamily::Gaussian { height, .. }, neg) => {
                let h = if neg { -height } else { *height };
                if h > 0.0 {
                    (h, true)
                } else {
                    (0.0, h == 0.0)
                }
            }
        }
    }

    /// `inf f`, by the same rules as [`TestFunction::supremum`].
    pub fn infimum(&self, model: &ModelManifold) -> (f64, bool) {
        let (s, attained) = self.negate().supremum(model);
        (-s, attained)
    }
}

/// `q = ρ²` with coordinate partials; smooth through the base point.
pub(crate) fn squared_distance_jet(model: &ModelManifold, x: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
    let n = model.dim;
    match model.distance_jet(x) {
        Ok(j) if j.rho > 1e-8 => {
            let dq = &j.d1 * (2.0 * j.rho);
            let d2q = &j.d1 * j.d1.transpose() * 2.0 + &j.d2 * (2.0 * j.rho);
            (j.rho * j.rho, dq, d2q)
        }
        _ => {
            // ρ ≈ σ(0)|y| near the base point.
            let s0 = model.conformal_factor(&model.base_point);
            let y = DVector::from_iterator(n, x.iter().zip(&model.base_point).map(|(a, b)| a - b));
            let q = s0 * s0 * y.norm_squared();
            (q, y * (2.0 * s0 * s0), DMatrix::identity(n, n) * (2.0 * s0 * s0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxprin::ModelKind;

    #[test]
    fn families_pass_cross_check() {
        let models = [
            ModelManifold::flat(2, vec![1.0, 0.0]).unwrap(),
            ModelManifold::new(ModelKind::Hyperbolic, -1.0, 2, None).unwrap(),
        ];
        for m in &models {
            for fam in [
                FunctionFamily::Constant { value: 2.0 },
                FunctionFamily::InverseQuadratic { amplitude: 1.0 },
                FunctionFamily::Gaussian { center: vec![0.2, 0.1], height: 1.5, width: 0.4 },
            ] {
                TestFunction::new(fam, m).unwrap();
            }
        }
    }

    #[test]
    fn suprema() {
        let m = ModelManifold::flat(2, vec![0.0, 0.0]).unwrap();
        let f = TestFunction::new(FunctionFamily::InverseQuadratic { amplitude: 2.0 }, &m).unwrap();
        assert_eq!(f.supremum(&m), (0.0, false));
        assert_eq!(f.negate().supremum(&m), (2.0, true));
        assert_eq!(f.infimum(&m), (-2.0, true));
        assert_eq!(f.negate().value(&m, &[0.0, 0.0]), 2.0);
    }
}
