use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Scalar;
use crate::error::{range, Error, Result};

/// Largest supported dimension. Keeps binomial coefficients and the
/// subset-enumeration oracles exactly representable.
pub const MAX_DIM: usize = 16;

/// Ordered principal curvatures `λ_1, …, λ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(range("spectrum must contain at least one value"));
        }
        if values.len() > MAX_DIM {
            return Err(range(format!(
                "spectrum dimension {} exceeds the cap of {MAX_DIM}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(range(format!("non-finite principal curvature {bad}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `S_0, …, S_n`.
    pub fn elem_sym_all(&self) -> Vec<f64> {
        elementary_symmetric(&self.values)
    }

    pub fn invariants(&self) -> CurvatureInvariants {
        CurvatureInvariants::from_elem_sym(self.elem_sym_all())
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            values: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        Spectrum::new(raw.values).map_err(serde::de::Error::custom)
    }
}

/// All elementary symmetric functions `σ_0, …, σ_n` of `values`.
///
/// Computed one value at a time over prefixes; `O(n²)` and free of the
/// cancellation-prone power-sum route.
pub fn elementary_symmetric<T: Scalar>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (k, lambda) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            let term = e[j - 1].clone() * lambda.clone();
            e[j] = e[j].clone() + term;
        }
    }
    e
}

/// `S_r = σ_r(λ_1, …, λ_n)`.
pub fn elem_sym(spec: &Spectrum, r: usize) -> Result<f64> {
    check_order(spec.dim(), r)?;
    Ok(spec.elem_sym_all()[r])
}

/// Signed `H_r = (-1)^r S_r / C(n, r)`.
pub fn mean_curvature(spec: &Spectrum, r: usize) -> Result<f64> {
    check_order(spec.dim(), r)?;
    Ok(signed_mean(spec.elem_sym_all()[r], spec.dim(), r))
}

/// `S_r(A_i)`: the `r`-th symmetric function of the spectrum with `λ_i`
/// removed. `i` is 1-based.
pub fn restricted_sym(spec: &Spectrum, i: usize, r: usize) -> Result<f64> {
    let n = spec.dim();
    if i == 0 || i > n {
        return Err(range(format!("index i = {i} outside 1..={n}")));
    }
    if r >= n {
        return Err(range(format!("order r = {r} outside 0..={}", n - 1)));
    }
    let rest: Vec<f64> = spec
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i - 1)
        .map(|(_, v)| *v)
        .collect();
    Ok(elementary_symmetric(&rest)[r])
}

/// `C(n, r)`, exact for `n ≤ 62`.
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, k| acc * (n - k) as u64 / (k + 1) as u64)
}

pub(crate) fn signed_mean(s_r: f64, n: usize, r: usize) -> f64 {
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    sign * s_r / binomial(n, r) as f64
}

fn check_order(n: usize, r: usize) -> Result<()> {
    if r > n {
        Err(range(format!("order r = {r} outside 0..={n}")))
    } else {
        Ok(())
    }
}

/// `S_r`, signed `H_r` and `b_r = (n - r) C(n, r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureInvariants {
    /// `S_0..=S_n`
    pub s: Vec<f64>,
    /// `H_0..=H_n`
    pub h: Vec<f64>,
    /// `b_0..b_{n-1}`
    pub b: Vec<f64>,
}

impl CurvatureInvariants {
    pub fn from_elem_sym(s: Vec<f64>) -> Self {
        let n = s.len() - 1;
        let h = s
            .iter()
            .enumerate()
            .map(|(r, &sr)| signed_mean(sr, n, r))
            .collect();
        let b = (0..n)
            .map(|r| ((n - r) as u64 * binomial(n, r)) as f64)
            .collect();
        Self { s, h, b }
    }

    pub fn dim(&self) -> usize {
        self.s.len() - 1
    }
}

/// A real symmetric `n × n` matrix. Symmetry is exact in storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(range(format!("matrix is {}x{}, not square", n, m.ncols())));
        }
        if n == 0 || n > MAX_DIM {
            return Err(range(format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(range("matrix has non-finite entries"));
        }
        for i in 0..n {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(range(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self(m))
    }

    /// `(m + mᵀ) / 2`, for matrices that are symmetric up to roundoff.
    pub fn symmetrized(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        }))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    /// `tr(self · other)` for symmetric operands.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        self.0.component_mul(&other.0).sum()
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += v[i] * self.0[(i, j)] * v[j];
            }
        }
        acc
    }

    /// Eigenvalues in ascending order together with the matching
    /// orthonormal eigenvectors (as columns).
    pub fn eigen(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let eig = SymmetricEigen::try_new(self.0.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.eigen().map(|(v, _)| v)
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.0
            .row_iter()
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self.0.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix rows must have equal length n"));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        SymMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
