use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::comparison::comparison_functions;
use crate::error::{config, range, Result};
use crate::symfunc::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Flat,
    Sphere,
    Hyperbolic,
}

/// A space form in a conformal chart `G = σ(|x|)² δ`: the identity chart
/// for flat space, stereographic coordinates for the sphere and the
/// Poincaré ball for hyperbolic space.
///
/// Curved models take the chart origin as base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifold {
    pub kind: ModelKind,
    pub curvature: f64,
    pub dim: usize,
    pub base_point: Vec<f64>,
}

/// `ρ` with its coordinate first and second partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceJet {
    pub rho: f64,
    pub d1: DVector<f64>,
    pub d2: DMatrix<f64>,
}

impl ModelManifold {
    pub fn flat(dim: usize, base_point: Vec<f64>) -> Result<Self> {
        Self::new(ModelKind::Flat, 0.0, dim, Some(base_point))
    }

    pub fn new(kind: ModelKind, curvature: f64, dim: usize, base_point: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(config("model dimension must be positive"));
        }
        let ok = match kind {
            ModelKind::Flat => curvature == 0.0,
            ModelKind::Sphere => curvature > 0.0 && curvature.is_finite(),
            ModelKind::Hyperbolic => curvature < 0.0 && curvature.is_finite(),
        };
        if !ok {
            return Err(config(format!("curvature {curvature} does not match a {kind:?} model")));
        }
        let base_point = base_point.unwrap_or_else(|| vec![0.0; dim]);
        if base_point.len() != dim || base_point.iter().any(|v| !v.is_finite()) {
            return Err(config("base point has the wrong dimension or is not finite"));
        }
        if kind != ModelKind::Flat && base_point.iter().any(|&v| v != 0.0) {
            return Err(config("curved models use the chart origin as base point"));
        }
        Ok(Self {
            kind,
            curvature,
            dim,
            base_point,
        })
    }

    fn kappa(&self) -> f64 {
        self.curvature.abs().sqrt()
    }

    /// Largest distance from the base point representable in the chart.
    pub fn max_distance(&self) -> f64 {
        match self.kind {
            ModelKind::Sphere => std::f64::consts::PI / self.kappa(),
            _ => f64::INFINITY,
        }
    }

    pub fn cut_locus_free(&self) -> bool {
        self.kind != ModelKind::Sphere
    }

    /// `σ(r)` and `ω'(r)` with `ω = log σ`.
    fn conformal(&self, r: f64) -> (f64, f64) {
        let k2 = self.curvature.abs();
        match self.kind {
            ModelKind::Flat => (1.0, 0.0),
            ModelKind::Hyperbolic => {
                let d = 1.0 - k2 * r * r;
                (2.0 / d, 2.0 * k2 * r / d)
            }
            ModelKind::Sphere => {
                let d = 1.0 + k2 * r * r;
                (2.0 / d, -2.0 * k2 * r / d)
            }
        }
    }

    pub fn conformal_factor(&self, x: &[f64]) -> f64 {
        self.conformal(self.offset(x).norm()).0
    }

    fn offset(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dim, x.iter().zip(&self.base_point).map(|(a, b)| a - b))
    }

    pub fn in_chart(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| v.is_finite())
            && match self.kind {
                ModelKind::Hyperbolic => self.kappa() * self.offset(x).norm() < 1.0,
                _ => true,
            }
    }

    /// Distance and chart radius as functions of each other.
    fn rho_of_r(&self, r: f64) -> (f64, f64, f64) {
        let k = self.kappa();
        let (sigma, omega) = self.conformal(r);
        let rho = match self.kind {
            ModelKind::Flat => r,
            ModelKind::Hyperbolic => 2.0 / k * (k * r).atanh(),
            ModelKind::Sphere => 2.0 / k * (k * r).atan(),
        };
        // ρ' = σ, ρ'' = σ ω'
        (rho, sigma, sigma * omega)
    }

    /// Chart point at distance `d` from the base point along `direction`.
    pub fn point_at(&self, direction: &[f64], d: f64) -> Vec<f64> {
        let k = self.kappa();
        let r = match self.kind {
            ModelKind::Flat => d,
            ModelKind::Hyperbolic => (k * d / 2.0).tanh() / k,
            ModelKind::Sphere => (k * d / 2.0).tan() / k,
        };
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        direction
            .iter()
            .zip(&self.base_point)
            .map(|(u, p)| p + r * u / norm)
            .collect()
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.rho_of_r(self.offset(x).norm()).0
    }

    /// `ρ`, `∂ρ` and `∂²ρ` in chart coordinates; `x` must differ from the
    /// base point.
    pub fn distance_jet(&self, x: &[f64]) -> Result<DistanceJet> {
        let y = self.offset(x);
        let r = y.norm();
        if r == 0.0 {
            return Err(range("distance is not differentiable at the base point"));
        }
        let (rho, d1r, d2r) = self.rho_of_r(r);
        let u = &y / r;
        let uu = &u * u.transpose();
        let proj = DMatrix::identity(self.dim, self.dim) - &uu;
        Ok(DistanceJet {
            rho,
            d1: &u * d1r,
            d2: uu * d2r + proj * (d1r / r),
        })
    }

    /// `∂_i ω` with `ω = log σ`.
    pub fn log_conformal_gradient(&self, x: &[f64]) -> DVector<f64> {
        let y = self.offset(x);
        let r = y.norm();
        if r == 0.0 {
            return DVector::zeros(self.dim);
        }
        let (_, omega) = self.conformal(r);
        y * (omega / r)
    }

    /// Covariant Hessian from coordinate partials, for `G = e^{2ω} δ`:
    /// `Γ^k_ij = δ_ik ω_j + δ_jk ω_i - δ_ij ω_k`.
    pub fn covariant_hessian(&self, x: &[f64], df: &DVector<f64>, d2f: &DMatrix<f64>) -> DMatrix<f64> {
        let w = self.log_conformal_gradient(x);
        let cross = &w * df.transpose();
        d2f - &cross - cross.transpose() + DMatrix::identity(self.dim, self.dim) * w.dot(df)
    }

    /// Bilinear form in an orthonormal frame `e_i = ∂_i / σ`.
    pub fn to_frame(&self, x: &[f64], m: &DMatrix<f64>) -> SymMatrix {
        let s = self.conformal_factor(x);
        SymMatrix::symmetrized(&(m / (s * s)))
    }

    /// Norm of the Riemannian gradient with coordinate differential `df`.
    pub fn gradient_norm(&self, x: &[f64], df: &DVector<f64>) -> f64 {
        df.norm() / self.conformal_factor(x)
    }

    /// `Hess ρ` in the orthonormal frame.
    pub fn distance_hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        let j = self.distance_jet(x)?;
        Ok(self.to_frame(x, &self.covariant_hessian(x, &j.d1, &j.d2)))
    }

    pub fn comparison(&self, rho: f64) -> Result<super::ComparisonValues> {
        comparison_functions(rho, self.curvature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<ModelManifold> {
        vec![
            ModelManifold::flat(3, vec![0.5, -1.0, 2.0]).unwrap(),
            ModelManifold::new(ModelKind::Hyperbolic, -0.7, 3, None).unwrap(),
            ModelManifold::new(ModelKind::Sphere, 2.0, 3, None).unwrap(),
        ]
    }

    #[test]
    fn distance_partials_match_differences() {
        for m in models() {
            let x = m.point_at(&[0.3, 0.5, -0.2], 0.8);
            let j = m.distance_jet(&x).unwrap();
            assert!((j.rho - 0.8).abs() < 1e-12);
            let h = 1e-5;
            for i in 0..3 {
                let mut a = x.clone();
                let mut b = x.clone();
                a[i] += h;
                b[i] -= h;
                let fd = (m.distance(&a) - m.distance(&b)) / (2.0 * h);
                assert!((fd - j.d1[i]).abs() < 1e-8);
                let fd2 = (m.distance_jet(&a).unwrap().d1 - m.distance_jet(&b).unwrap().d1) / (2.0 * h);
                assert!((fd2 - j.d2.column(i)).amax() < 1e-6);
            }
            assert!((m.gradient_norm(&x, &j.d1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_hessian_is_the_model_comparison() {
        for m in models() {
            for d in [0.2, 1.0, 2.0] {
                let x = m.point_at(&[1.0, 2.0, 0.5], d);
                let hess = m.distance_hessian(&x).unwrap();
                let ev = hess.eigenvalues().unwrap();
                let k = m.comparison(d).unwrap().standard_bound;
                let mut expected = vec![0.0, k, k];
                expected.sort_by(f64::total_cmp);
                for (l, e) in ev.iter().zip(&expected) {
                    assert!((l - e).abs() < 1e-10 * k.abs().max(1.0), "{:?} {ev:?} vs {k}", m.kind);
                }
            }
        }
    }

    #[test]
    fn curved_models_need_origin() {
        assert!(ModelManifold::new(ModelKind::Sphere, 1.0, 2, Some(vec![1.0, 0.0])).is_err());
        assert!(ModelManifold::new(ModelKind::Hyperbolic, 1.0, 2, None).is_err());
    }
}
