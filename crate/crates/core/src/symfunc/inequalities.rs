use num_traits::pow;
use serde::Serialize;

use super::spectrum::{binomial, elementary_symmetric};
use super::Scalar;

/// Relative tolerance under which a floating-point Newton gap counts as an
/// equality: `|H_r² - H_{r-1}H_{r+1}| ≤ 1e-10 · scale`.
const EQUALITY_TOL: f64 = 1e-10;
/// Allowed negative excursion of a Newton gap, relative to its majorant.
const VIOLATION_TOL: f64 = 1e-12;
/// Spread under which floating-point values are treated as all equal.
const SPREAD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct NewtonGap {
    pub r: usize,
    /// `H_r² - H_{r-1} H_{r+1}`.
    pub gap: f64,
    /// Same expression on `|λ_i|` (upper bound on every term).
    pub scale: f64,
    pub equality: bool,
    /// When `equality` triggers the rigidity clause, whether all λ agree.
    pub all_equal: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ChainVerdict {
    /// `H_1 ≥ H_2^{1/2} ≥ … ≥ H_r^{1/r}` holds; lists every `j` with equality
    /// between positions `j` and `j + 1`.
    Holds { r: usize, equalities: Vec<usize> },
    NotApplicable { reason: String },
    Violated { at: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct VanishingCheck {
    pub r: usize,
    /// `H_j = 0` for every `r ≤ j ≤ n`.
    pub propagates: bool,
    pub nonzero_count: usize,
}

/// Outcome of the Newton/Maclaurin checks on one spectrum, using the unsigned
/// normalisation `H_r = S_r / C(n, r)`.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonMaclaurinVerdict {
    pub n: usize,
    pub r_max: usize,
    pub exact: bool,
    pub gaps: Vec<NewtonGap>,
    pub chain: ChainVerdict,
    pub vanishing: Vec<VanishingCheck>,
    pub violations: Vec<String>,
}

impl NewtonMaclaurinVerdict {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Most negative `gap / scale` over all orders checked.
    pub fn worst_scaled_gap(&self) -> f64 {
        self.gaps
            .iter()
            .map(|g| if g.scale > 0.0 { g.gap / g.scale } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }
}

struct Zeroish<'a, T: Scalar> {
    h: &'a [T],
    majorant: &'a [f64],
}

impl<T: Scalar> Zeroish<'_, T> {
    fn is_zero(&self, j: usize) -> bool {
        if T::EXACT {
            self.h[j].is_zero()
        } else {
            self.h[j].to_f64_lossy().abs() <= VIOLATION_TOL * self.majorant[j]
        }
    }
}

/// Checks, on a real spectrum:
///
/// - `H_r² ≥ H_{r-1} H_{r+1}` for `1 ≤ r ≤ min(r_max, n - 1)`, with the
///   rigidity clause in the equality case;
/// - the Maclaurin chain up to `r_max` when `H_1, …, H_{r_max} > 0`;
/// - vanishing propagation: `H_r = H_{r+1} = 0` forces `H_j = 0` for `j ≥ r`
///   and at most `r - 1` non-zero values.
///
/// With `T = BigRational` all comparisons are exact; with `f64` the module
/// tolerances apply.
pub fn newton_maclaurin_check<T: Scalar>(values: &[T], r_max: usize) -> NewtonMaclaurinVerdict {
    let n = values.len();
    let r_max = r_max.min(n);
    let s = elementary_symmetric(values);
    let h: Vec<T> = s
        .iter()
        .enumerate()
        .map(|(r, sr)| sr.clone() / T::from_u64_exact(binomial(n, r)))
        .collect();
    let abs: Vec<f64> = values.iter().map(|v| v.to_f64_lossy().abs()).collect();
    let majorant: Vec<f64> = elementary_symmetric(&abs)
        .iter()
        .enumerate()
        .map(|(r, m)| m / binomial(n, r) as f64)
        .collect();
    let zero = Zeroish {
        h: &h,
        majorant: &majorant,
    };
    let all_equal = || all_values_equal(values);

    let mut violations = Vec::new();
    let mut gaps = Vec::new();
    for r in 1..=r_max.min(n.saturating_sub(1)) {
        let gap = h[r].clone() * h[r].clone() - h[r - 1].clone() * h[r + 1].clone();
        let gap_f = gap.to_f64_lossy();
        let scale = majorant[r] * majorant[r] + majorant[r - 1] * majorant[r + 1];
        let (violated, equality) = if T::EXACT {
            (gap < T::zero(), gap.is_zero())
        } else {
            (gap_f < -VIOLATION_TOL * scale, gap_f.abs() <= EQUALITY_TOL * scale)
        };
        if violated {
            violations.push(format!("H_{r}^2 < H_{}H_{} (gap {gap_f:e})", r - 1, r + 1));
        }
        let rigid = equality && (r == 1 || !zero.is_zero(r + 1));
        let all_equal = rigid.then(all_equal);
        if all_equal == Some(false) {
            violations.push(format!(
                "equality in H_{r}^2 >= H_{}H_{} with unequal values",
                r - 1,
                r + 1
            ));
        }
        gaps.push(NewtonGap {
            r,
            gap: gap_f,
            scale,
            equality,
            all_equal,
        });
    }

    let chain = maclaurin_chain(&h, r_max, &zero, values, &mut violations);

    let mut vanishing = Vec::new();
    for r in 1..=r_max.min(n.saturating_sub(1)) {
        if zero.is_zero(r) && zero.is_zero(r + 1) {
            let propagates = (r..=n).all(|j| zero.is_zero(j));
            let nonzero_count = count_nonzero(values);
            if !propagates {
                violations.push(format!("H_{r} = H_{} = 0 but some later H_j is non-zero", r + 1));
            }
            if nonzero_count + 1 > r {
                violations.push(format!(
                    "H_{r} = H_{} = 0 with {nonzero_count} non-zero values (at most {} allowed)",
                    r + 1,
                    r - 1
                ));
            }
            vanishing.push(VanishingCheck {
                r,
                propagates,
                nonzero_count,
            });
        }
    }

    NewtonMaclaurinVerdict {
        n,
        r_max,
        exact: T::EXACT,
        gaps,
        chain,
        vanishing,
        violations,
    }
}

fn maclaurin_chain<T: Scalar>(
    h: &[T],
    r_max: usize,
    zero: &Zeroish<'_, T>,
    values: &[T],
    violations: &mut Vec<String>,
) -> ChainVerdict {
    if r_max < 2 {
        return ChainVerdict::NotApplicable {
            reason: "chain needs r > 1".into(),
        };
    }
    for j in 1..=r_max {
        if zero.is_zero(j) {
            return ChainVerdict::NotApplicable {
                reason: format!("H_{j} = 0"),
            };
        }
        if h[j] < T::zero() {
            return ChainVerdict::NotApplicable {
                reason: format!("H_{j} < 0"),
            };
        }
    }
    let mut equalities = Vec::new();
    for j in 1..r_max {
        // H_j^{1/j} ≥ H_{j+1}^{1/(j+1)}  ⇔  H_j^{j+1} ≥ H_{j+1}^j  (both positive)
        let lhs = pow(h[j].clone(), j + 1);
        let rhs = pow(h[j + 1].clone(), j);
        let (violated, equal) = if T::EXACT {
            (lhs < rhs, lhs == rhs)
        } else {
            let (l, r) = (lhs.to_f64_lossy(), rhs.to_f64_lossy());
            let mag = l.abs().max(r.abs());
            (l < r - VIOLATION_TOL * mag, (l - r).abs() <= EQUALITY_TOL * mag)
        };
        if violated {
            violations.push(format!("Maclaurin chain breaks between H_{j} and H_{}", j + 1));
            return ChainVerdict::Violated { at: j };
        }
        if equal {
            if !all_values_equal(values) {
                violations.push(format!(
                    "Maclaurin equality between H_{j} and H_{} with unequal values",
                    j + 1
                ));
            }
            equalities.push(j);
        }
    }
    ChainVerdict::Holds {
        r: r_max,
        equalities,
    }
}

fn all_values_equal<T: Scalar>(values: &[T]) -> bool {
    let Some(first) = values.first() else {
        return true;
    };
    if T::EXACT {
        values.iter().all(|v| v == first)
    } else {
        let f: Vec<f64> = values.iter().map(|v| v.to_f64_lossy()).collect();
        let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mag = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        hi - lo <= SPREAD_TOL * mag
    }
}

fn count_nonzero<T: Scalar>(values: &[T]) -> usize {
    if T::EXACT {
        values.iter().filter(|v| !v.is_zero()).count()
    } else {
        let mag = values.iter().fold(1.0f64, |m, v| m.max(v.to_f64_lossy().abs()));
        values
            .iter()
            .filter(|v| v.to_f64_lossy().abs() > VIOLATION_TOL * mag)
            .count()
    }
}
