use serde::{Deserialize, Serialize};
use std::fmt;

use super::ModelError;
use crate::special::{ln_gamma, regularized_gamma_p};

/// Gamma distribution with shape `q` and rate `β`:
/// `f(x) = β^q x^(q-1) e^(-βx) / Γ(q)` for `x > 0`.
///
/// This is the stationary law of a persistent boundary process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLaw {
    shape: f64,
    rate: f64,
}

impl GammaLaw {
    pub fn new(shape: f64, rate: f64) -> Result<Self, ModelError> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(ModelError::InvalidArgument(format!(
                "Gamma shape must be finite and > 0, got {shape}"
            )));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(ModelError::InvalidArgument(format!(
                "Gamma rate must be finite and > 0, got {rate}"
            )));
        }
        Ok(GammaLaw { shape, rate })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shape * self.rate.ln() + (self.shape - 1.0) * x.ln()
            - self.rate * x
            - ln_gamma(self.shape)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            // the q < 1 pole and the q = 1 limit are irrelevant for the
            // stationary laws we produce, so the density is 0 off (0, inf)
            return 0.0;
        }
        self.ln_density(x).exp()
    }

    /// `P(X <= x)`, the regularized lower incomplete gamma `P(q, βx)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        regularized_gamma_p(self.shape, self.rate * x)
    }
}

impl fmt::Display for GammaLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ga({}, {})", self.shape, self.rate)
    }
}

/// `E[X^p] = Γ(p + q) / (β^p Γ(q))` for `p > 0`.
pub fn gamma_moment(law: &GammaLaw, p: f64) -> Result<f64, ModelError> {
    if !(p.is_finite() && p > 0.0) {
        return Err(ModelError::InvalidArgument(format!(
            "moment order must be finite and > 0, got {p}"
        )));
    }
    let q = law.shape();
    Ok((ln_gamma(p + q) - ln_gamma(q) - p * law.rate().ln()).exp())
}
