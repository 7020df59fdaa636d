use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Arithmetic the symmetric-function algebra can run on: `f64` for the
/// production path, [`BigRational`] when equality cases must be decided
/// exactly.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive {
    /// Whether comparisons in this arithmetic are exact.
    const EXACT: bool;

    fn to_f64_lossy(&self) -> f64;

    fn from_u64_exact(v: u64) -> Self {
        Self::from_u64(v).expect("u64 fits every supported scalar")
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// `num / den` as an exact rational.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
