use num_rational::BigRational;
use serde::Serialize;

use super::spectrum::{binomial, elementary_symmetric, Spectrum};
use super::Scalar;
use crate::error::{range, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionalCurvature<T> {
    pub i: usize,
    pub j: usize,
    /// `c - λ_i λ_j`
    pub value: T,
}

/// Gauss-equation data of a spacelike hypersurface with principal curvatures
/// `λ` in an ambient of constant sectional curvature `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussCurvature<T> {
    /// `R = n(n-1)(c - H_2)`.
    pub scalar_curvature: T,
    /// Sectional curvature of each principal plane, `i < j`.
    pub sectional: Vec<SectionalCurvature<T>>,
    /// `Σ_{i≠j} K_ij`, which must equal `scalar_curvature`.
    pub pairwise_sum: T,
    /// `2 S_2 + |A|² - S_1²`, zero in exact arithmetic.
    pub identity_residual: T,
}

impl<T: Scalar> GaussCurvature<T> {
    /// `c - max_{i<j} λ_i λ_j`: the minimum sectional curvature over all
    /// tangent 2-planes (for `n ≥ 3` the extremal planes are principal).
    pub fn min_sectional(&self) -> T {
        self.sectional
            .iter()
            .map(|k| k.value.clone())
            .reduce(|a, b| if b < a { b } else { a })
            .expect("n >= 2 gives at least one plane")
    }
}

fn gauss_generic<T: Scalar>(values: &[T], c: T) -> GaussCurvature<T> {
    let n = values.len();
    let s = elementary_symmetric(values);
    let nn1 = T::from_u64_exact((n * (n - 1)) as u64);
    let h2 = s[2].clone() / T::from_u64_exact(binomial(n, 2));
    let scalar_curvature = nn1 * (c.clone() - h2);

    let mut sectional = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            sectional.push(SectionalCurvature {
                i,
                j,
                value: c.clone() - values[i].clone() * values[j].clone(),
            });
        }
    }
    let two = T::from_u64_exact(2);
    let pairwise_sum = sectional
        .iter()
        .fold(T::zero(), |acc, k| acc + two.clone() * k.value.clone());
    let norm_sq = values
        .iter()
        .fold(T::zero(), |acc, v| acc + v.clone() * v.clone());
    let identity_residual = two * s[2].clone() + norm_sq - s[1].clone() * s[1].clone();

    GaussCurvature {
        scalar_curvature,
        sectional,
        pairwise_sum,
        identity_residual,
    }
}

pub fn gauss_curvature_data(spec: &Spectrum, c: f64) -> Result<GaussCurvature<f64>> {
    if spec.dim() < 2 {
        return Err(range("Gauss data needs n >= 2"));
    }
    Ok(gauss_generic(spec.values(), c))
}

/// Exact-rational variant; `Σ_{i≠j}(c - λ_iλ_j) = n(n-1)(c - H_2)` holds
/// with equality here.
pub fn gauss_curvature_exact(values: &[BigRational], c: BigRational) -> Result<GaussCurvature<BigRational>> {
    if values.len() < 2 {
        return Err(range("Gauss data needs n >= 2"));
    }
    Ok(gauss_generic(values, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::rational;

    #[test]
    fn steady_state_slice_is_flat() {
        let spec = Spectrum::new(vec![-1.0; 4]).unwrap();
        let g = gauss_curvature_data(&spec, 1.0).unwrap();
        assert_eq!(g.scalar_curvature, 0.0);
        assert!(g.sectional.iter().all(|k| k.value == 0.0));
        assert_eq!(g.identity_residual, 0.0);
    }

    #[test]
    fn h2_equal_c_gives_zero_scalar_curvature() {
        // λ = (2, 1/2): H_2 = S_2 = 1
        let spec = Spectrum::new(vec![2.0, 0.5]).unwrap();
        let g = gauss_curvature_data(&spec, 1.0).unwrap();
        assert_eq!(g.scalar_curvature, 0.0);
    }

    #[test]
    fn pairwise_sum_matches_trace_route() {
        let vals = [0.3, -1.7, 2.2, 0.05, -0.4];
        let spec = Spectrum::new(vals.to_vec()).unwrap();
        let c = 0.8;
        let g = gauss_curvature_data(&spec, c).unwrap();
        // independent route: 2 S_2 = S_1^2 - |A|^2
        let s1: f64 = vals.iter().sum();
        let a2: f64 = vals.iter().map(|v| v * v).sum();
        let n = vals.len() as f64;
        let oracle = n * (n - 1.0) * c - (s1 * s1 - a2);
        assert!((g.pairwise_sum - oracle).abs() < 1e-12);
        assert!((g.scalar_curvature - oracle).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_is_exact() {
        let vals = vec![rational(1, 3), rational(-7, 5), rational(2, 1)];
        let g = gauss_curvature_exact(&vals, rational(1, 1)).unwrap();
        assert_eq!(g.pairwise_sum, g.scalar_curvature);
        assert_eq!(g.identity_residual, rational(0, 1));
    }

    #[test]
    fn needs_two_dimensions() {
        assert!(gauss_curvature_data(&Spectrum::new(vec![1.0]).unwrap(), 1.0).is_err());
    }
}
