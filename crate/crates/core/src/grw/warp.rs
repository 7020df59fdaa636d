use serde::{Deserialize, Serialize};

use crate::error::{config, Result};

/// Warping function `g(t)` of `-I ×_g ℝ^n`, with analytic derivatives.
///
/// The warp appears as `f` in some of the classical literature on GRW
/// spacetimes; here it is always `g`, and `(log g)'` is what enters the
/// height-function formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warp {
    /// `g(t) = e^t`: the Steady State space, constant curvature 1.
    SteadyState,
    /// `g(t) = e^{a t}`: constant curvature `a²`.
    Exponential { rate: f64 },
    /// `g(t) = cosh t` over a flat fiber; curvature is not constant.
    Cosh,
    /// `g(t) = t^p` on `t > 0`; curvature is not constant unless `p = 0`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AmbientCurvature {
    Constant(f64),
    NonConstant,
}

impl Warp {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Warp::SteadyState => t.exp(),
            Warp::Exponential { rate } => (rate * t).exp(),
            Warp::Cosh => t.cosh(),
            Warp::Power { exponent } => t.powf(exponent),
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        match *self {
            Warp::SteadyState => t.exp(),
            Warp::Exponential { rate } => rate * (rate * t).exp(),
            Warp::Cosh => t.sinh(),
            Warp::Power { exponent } => exponent * t.powf(exponent - 1.0),
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match *self {
            Warp::SteadyState => t.exp(),
            Warp::Exponential { rate } => rate * rate * (rate * t).exp(),
            Warp::Cosh => t.cosh(),
            Warp::Power { exponent } => exponent * (exponent - 1.0) * t.powf(exponent - 2.0),
        }
    }

    /// `(log g)'(t) = g'(t) / g(t)`.
    pub fn log_derivative(&self, t: f64) -> f64 {
        match *self {
            Warp::SteadyState => 1.0,
            Warp::Exponential { rate } => rate,
            Warp::Cosh => t.tanh(),
            Warp::Power { exponent } => exponent / t,
        }
    }

    /// Largest interval on which `g > 0`.
    pub fn natural_interval(&self) -> (f64, f64) {
        match self {
            Warp::Power { .. } => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn ambient_curvature(&self) -> AmbientCurvature {
        match *self {
            Warp::SteadyState => AmbientCurvature::Constant(1.0),
            Warp::Exponential { rate } => AmbientCurvature::Constant(rate * rate),
            Warp::Power { exponent } if exponent == 0.0 => AmbientCurvature::Constant(0.0),
            Warp::Cosh | Warp::Power { .. } => AmbientCurvature::NonConstant,
        }
    }
}

/// The Lorentzian warped product `-I ×_g ℝ^n` with flat fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpedProduct {
    pub fiber_dim: usize,
    pub warp: Warp,
    pub interval: (f64, f64),
}

impl WarpedProduct {
    pub fn new(fiber_dim: usize, warp: Warp, interval: Option<(f64, f64)>) -> Result<Self> {
        if fiber_dim < 2 {
            return Err(config(format!("fiber dimension {fiber_dim} < 2")));
        }
        if let Warp::Exponential { rate } | Warp::Power { exponent: rate } = warp {
            if !rate.is_finite() {
                return Err(config("warp parameter must be finite"));
            }
        }
        let natural = warp.natural_interval();
        let interval = interval.unwrap_or(natural);
        if !(interval.0 < interval.1) || interval.0 < natural.0 || interval.1 > natural.1 {
            return Err(config(format!(
                "interval {interval:?} is empty or leaves the domain {natural:?} where g > 0"
            )));
        }
        Ok(Self {
            fiber_dim,
            warp,
            interval,
        })
    }

    /// `ℋ^{n+1} = -ℝ ×_{e^t} ℝ^n`.
    pub fn steady_state(fiber_dim: usize) -> Result<Self> {
        Self::new(fiber_dim, Warp::SteadyState, None)
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.interval.0 && t < self.interval.1
    }

    pub fn ambient_curvature(&self) -> AmbientCurvature {
        self.warp.ambient_curvature()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let warps = [
            Warp::SteadyState,
            Warp::Exponential { rate: -0.7 },
            Warp::Cosh,
            Warp::Power { exponent: 1.5 },
        ];
        let h = 1e-5;
        for w in warps {
            let t = 0.8;
            let fd1 = (w.value(t + h) - w.value(t - h)) / (2.0 * h);
            let fd2 = (w.d1(t + h) - w.d1(t - h)) / (2.0 * h);
            assert!((fd1 - w.d1(t)).abs() < 1e-8, "{w:?}");
            assert!((fd2 - w.d2(t)).abs() < 1e-8, "{w:?}");
            assert!((w.log_derivative(t) - w.d1(t) / w.value(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn steady_state_has_unit_curvature() {
        let m = WarpedProduct::steady_state(3).unwrap();
        assert_eq!(m.ambient_curvature(), AmbientCurvature::Constant(1.0));
        assert!(m.contains(-40.0));
    }

    #[test]
    fn rejects_bad_products() {
        assert!(WarpedProduct::steady_state(1).is_err());
        assert!(WarpedProduct::new(2, Warp::Power { exponent: 2.0 }, Some((-1.0, 1.0))).is_err());
        assert!(WarpedProduct::new(2, Warp::Cosh, Some((1.0, 1.0))).is_err());
    }
}
