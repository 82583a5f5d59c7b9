//! Numerical tolerances.

use crate::error::{invalid, Result};

/// Absolute bound for quantities that are exactly zero in exact arithmetic
/// (spectral leakage, ZCZ sidelobes, unimodularity) at L ≤ 10⁴.
pub const ZERO: f64 = 1e-9;

/// Relative bound for exact identities such as Σ_τ|θ(τ)|² = L³/(L−n).
pub const RELATIVE: f64 = 1e-9;

/// Relative bound for comparing measured correlations against lower bounds.
pub const BOUND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub zero: f64,
    pub relative: f64,
    pub bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: ZERO,
            relative: RELATIVE,
            bound: BOUND,
        }
    }
}

impl Tolerances {
    /// One value for all three bounds.
    pub fn uniform(tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return invalid(format!("tolerance must be positive and finite, got {tol}"));
        }
        Ok(Self {
            zero: tol,
            relative: tol,
            bound: tol,
        })
    }

    /// Defaults, or a uniform override taken from `SCS_TOL` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var("SCS_TOL") {
            Ok(raw) => match raw.trim().parse::<f64>() {
                Ok(t) => Self::uniform(t),
                Err(_) => invalid(format!("SCS_TOL is not a number: {raw:?}")),
            },
            Err(_) => Ok(Self::default()),
        }
    }
}
