//! Parameters, derived growth rates and closed-form predictions for the
//! two-species Wolbachia-invasion model
//!
//! ```text
//! dI = I [b_I - δ_I - d_I (I + U)] dt + σ_I I dB_1
//! dU = U [b_U U / (I + U) - δ_U - d_U (I + U)] dt + σ_U U dB_2
//! ```
//!
//! `I` counts Wolbachia-infected mosquitoes and `U` uninfected (wild) ones.
//! The frequency-dependent birth term `b_U U / (I + U)` encodes cytoplasmic
//! incompatibility.

mod equilibria;
mod gamma;
mod regime;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub use equilibria::{equilibria, Equilibria};
pub use gamma::{gamma_moment, GammaLaw};
pub use regime::{
    classify, classify_with_tolerance, predicted_extinction_exponent, ExtinctionExponent, Regime,
    RegimeTag,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("no stationary law for the {species} population: {reason}")]
    NoStationaryLaw { species: Species, reason: String },
    #[error("no exact extinction exponent for regime {0}")]
    NotApplicable(RegimeTag),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Which of the two populations a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Infected,
    Uninfected,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::Infected, Species::Uninfected];

    pub fn symbol(self) -> &'static str {
        match self {
            Species::Infected => "I",
            Species::Uninfected => "U",
        }
    }

    pub fn other(self) -> Species {
        match self {
            Species::Infected => Species::Uninfected,
            Species::Uninfected => Species::Infected,
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Species::Infected => f.write_str("infected"),
            Species::Uninfected => f.write_str("uninfected"),
        }
    }
}

impl std::str::FromStr for Species {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "infected" | "I" | "i" => Ok(Species::Infected),
            "uninfected" | "U" | "u" => Ok(Species::Uninfected),
            other => Err(format!(
                "unknown species {other:?} (expected infected or uninfected)"
            )),
        }
    }
}

/// The eight rates of the stochastic model.
///
/// Birth and decay rates are per unit time; `d_*` are per unit time per
/// individual; `sigma_*` are white-noise intensities (time^-1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    #[serde(rename = "b_I")]
    pub b_i: f64,
    #[serde(rename = "b_U")]
    pub b_u: f64,
    #[serde(rename = "delta_I")]
    pub delta_i: f64,
    #[serde(rename = "delta_U")]
    pub delta_u: f64,
    #[serde(rename = "d_I")]
    pub d_i: f64,
    #[serde(rename = "d_U")]
    pub d_u: f64,
    #[serde(rename = "sigma_I")]
    pub sigma_i: f64,
    #[serde(rename = "sigma_U")]
    pub sigma_u: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::base_rates()
    }
}

impl ModelParams {
    /// Field-study base rates (b_I = 0.45, b_U = 0.55, δ_I = 0.05,
    /// δ_U = 0.048, d_I = d_U = 0.001) with no noise.
    pub const fn base_rates() -> Self {
        ModelParams {
            b_i: 0.45,
            b_u: 0.55,
            delta_i: 0.05,
            delta_u: 0.048,
            d_i: 0.001,
            d_u: 0.001,
            sigma_i: 0.0,
            sigma_u: 0.0,
        }
    }

    pub const fn with_noise(self, sigma_i: f64, sigma_u: f64) -> Self {
        ModelParams {
            sigma_i,
            sigma_u,
            ..self
        }
    }

    pub fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("b_I", self.b_i),
            ("b_U", self.b_u),
            ("delta_I", self.delta_i),
            ("delta_U", self.delta_u),
            ("d_I", self.d_i),
            ("d_U", self.d_u),
            ("sigma_I", self.sigma_i),
            ("sigma_U", self.sigma_u),
        ]
    }

    /// All eight fields finite and nonnegative.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in self.fields() {
            if !value.is_finite() {
                return Err(ModelError::InvalidParams {
                    field,
                    reason: format!("must be finite, got {value}"),
                });
            }
            if value < 0.0 {
                return Err(ModelError::InvalidParams {
                    field,
                    reason: format!("must be nonnegative, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus strictly positive density-dependent
    /// decay rates, which the threshold ratios λ/d divide by.
    pub fn validate_positive_density(&self) -> Result<(), ModelError> {
        self.validate()?;
        for (field, value) in [("d_I", self.d_i), ("d_U", self.d_u)] {
            if value <= 0.0 {
                return Err(ModelError::InvalidParams {
                    field,
                    reason: format!("must be > 0 for classification, got {value}"),
                });
            }
        }
        Ok(())
    }

    pub fn birth(&self, species: Species) -> f64 {
        match species {
            Species::Infected => self.b_i,
            Species::Uninfected => self.b_u,
        }
    }

    pub fn decay(&self, species: Species) -> f64 {
        match species {
            Species::Infected => self.delta_i,
            Species::Uninfected => self.delta_u,
        }
    }

    pub fn density_decay(&self, species: Species) -> f64 {
        match species {
            Species::Infected => self.d_i,
            Species::Uninfected => self.d_u,
        }
    }

    pub fn sigma(&self, species: Species) -> f64 {
        match species {
            Species::Infected => self.sigma_i,
            Species::Uninfected => self.sigma_u,
        }
    }
}

/// Population sizes (I, U).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    #[serde(rename = "I")]
    pub infected: f64,
    #[serde(rename = "U")]
    pub uninfected: f64,
}

impl State {
    pub const ORIGIN: State = State::new(0.0, 0.0);

    pub const fn new(infected: f64, uninfected: f64) -> Self {
        State {
            infected,
            uninfected,
        }
    }

    pub fn get(&self, species: Species) -> f64 {
        match species {
            Species::Infected => self.infected,
            Species::Uninfected => self.uninfected,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.infected.is_finite()
            && self.uninfected.is_finite()
            && self.infected >= 0.0
            && self.uninfected >= 0.0
    }

    pub fn norm(&self) -> f64 {
        self.infected.hypot(self.uninfected)
    }

    pub fn distance(&self, other: &State) -> f64 {
        (self.infected - other.infected).hypot(self.uninfected - other.uninfected)
    }
}

/// Net stochastic growth rates and, where the noise is nonzero, the Gamma
/// parameters of the boundary stationary laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub lambda_i: f64,
    pub lambda_u: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_i: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_i: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_u: Option<f64>,
}

impl DerivedQuantities {
    pub fn lambda(&self, species: Species) -> f64 {
        match species {
            Species::Infected => self.lambda_i,
            Species::Uninfected => self.lambda_u,
        }
    }

    pub fn shape(&self, species: Species) -> Option<f64> {
        match species {
            Species::Infected => self.q_i,
            Species::Uninfected => self.q_u,
        }
    }

    pub fn rate(&self, species: Species) -> Option<f64> {
        match species {
            Species::Infected => self.beta_i,
            Species::Uninfected => self.beta_u,
        }
    }
}

/// λ = b − δ − σ²/2, q = 2λ/σ², β = 2d/σ². `q` and `β` are `None` for zero noise.
pub fn derive(params: &ModelParams) -> DerivedQuantities {
    let lambda = |b: f64, delta: f64, sigma: f64| b - delta - 0.5 * sigma * sigma;
    let gamma_pair = |lambda: f64, d: f64, sigma: f64| {
        if sigma > 0.0 {
            let s2 = sigma * sigma;
            (Some(2.0 * lambda / s2), Some(2.0 * d / s2))
        } else {
            (None, None)
        }
    };
    let lambda_i = lambda(params.b_i, params.delta_i, params.sigma_i);
    let lambda_u = lambda(params.b_u, params.delta_u, params.sigma_u);
    let (q_i, beta_i) = gamma_pair(lambda_i, params.d_i, params.sigma_i);
    let (q_u, beta_u) = gamma_pair(lambda_u, params.d_u, params.sigma_u);
    DerivedQuantities {
        lambda_i,
        lambda_u,
        q_i,
        q_u,
        beta_i,
        beta_u,
    }
}

/// Stationary law Ga(q, β) of the one-species boundary process.
pub fn stationary_law(params: &ModelParams, species: Species) -> Result<GammaLaw, ModelError> {
    let derived = derive(params);
    let lambda = derived.lambda(species);
    if params.sigma(species) <= 0.0 {
        return Err(ModelError::NoStationaryLaw {
            species,
            reason: "noise intensity is zero (the boundary equation is deterministic)".into(),
        });
    }
    if lambda <= 0.0 {
        return Err(ModelError::NoStationaryLaw {
            species,
            reason: format!("net growth rate λ = {lambda} is not positive"),
        });
    }
    match (derived.shape(species), derived.rate(species)) {
        (Some(shape), Some(rate)) => {
            GammaLaw::new(shape, rate).map_err(|_| ModelError::NoStationaryLaw {
                species,
                reason: format!("degenerate Gamma parameters ({shape}, {rate})"),
            })
        }
        _ => unreachable!("shape and rate are present whenever sigma > 0"),
    }
}

/// Long-run time average λ/d of a persistent boundary process.
pub fn long_run_mean(params: &ModelParams, species: Species) -> Result<f64, ModelError> {
    let lambda = derive(params).lambda(species);
    if lambda <= 0.0 {
        return Err(ModelError::NoStationaryLaw {
            species,
            reason: format!("net growth rate λ = {lambda} is not positive"),
        });
    }
    let d = params.density_decay(species);
    if d <= 0.0 {
        return Err(ModelError::InvalidParams {
            field: if species == Species::Infected {
                "d_I"
            } else {
                "d_U"
            },
            reason: "density-dependent decay must be > 0".into(),
        });
    }
    Ok(lambda / d)
}

/// Deterministic part of the vector field, `(dI/dt, dU/dt)`.
///
/// The ratio `U/(I+U)` is taken as 0 at the origin, which keeps the origin
/// an equilibrium.
pub fn drift(state: State, params: &ModelParams) -> (f64, f64) {
    let State {
        infected: i,
        uninfected: u,
    } = state;
    let total = i + u;
    let ratio = uninfected_fraction(i, u);
    (
        i * (params.b_i - params.delta_i - params.d_i * total),
        u * (params.b_u * ratio - params.delta_u - params.d_u * total),
    )
}

#[inline]
pub(crate) fn uninfected_fraction(infected: f64, uninfected: f64) -> f64 {
    let total = infected + uninfected;
    if total > 0.0 {
        uninfected / total
    } else {
        0.0
    }
}
