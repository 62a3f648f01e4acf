//! Threshold classification of long-run behavior.
//!
//! | tag | condition                                             | outcome                               |
//! |-----|-------------------------------------------------------|---------------------------------------|
//! | A.1 | λ_U < 0, λ_I < 0                                      | both populations go extinct           |
//! | A.2 | λ_U < 0, λ_I > 0                                      | I persists with law μ_I, U dies       |
//! | B.1 | λ_U > 0, λ_I/d_I > λ_U/d_U                            | I persists with law μ_I, U dies       |
//! | B.2 | λ_U > 0, λ_I < λ_U − b_U                              | I dies, U persists with law μ_U       |
//! | B.3 | λ_U > 0, λ_U − b_U ≤ λ_I < 0 or 0 < λ_I/d_I ≤ λ_U/d_U | invariant laws live on the boundaries |
//!
//! λ_U = 0, and λ_I = 0 in either branch, are left as `Indeterminate`.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::{
    derive, stationary_law, DerivedQuantities, GammaLaw, ModelError, ModelParams, Species,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    /// A.1
    BothExtinct,
    /// A.2
    InfectedPersistsUninfectedDies,
    /// B.1
    InfectedPersistsUninfectedDiesHighNoise,
    /// B.2
    InfectedDiesUninfectedPersists,
    /// B.3
    BoundaryMixture,
    Indeterminate,
}

impl RegimeTag {
    pub fn code(self) -> &'static str {
        match self {
            RegimeTag::BothExtinct => "A.1",
            RegimeTag::InfectedPersistsUninfectedDies => "A.2",
            RegimeTag::InfectedPersistsUninfectedDiesHighNoise => "B.1",
            RegimeTag::InfectedDiesUninfectedPersists => "B.2",
            RegimeTag::BoundaryMixture => "B.3",
            RegimeTag::Indeterminate => "indeterminate",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            RegimeTag::BothExtinct => "both populations go extinct",
            RegimeTag::InfectedPersistsUninfectedDies
            | RegimeTag::InfectedPersistsUninfectedDiesHighNoise => {
                "infected population persists, uninfected population dies out exponentially"
            }
            RegimeTag::InfectedDiesUninfectedPersists => {
                "infected population dies out exponentially, uninfected population persists"
            }
            RegimeTag::BoundaryMixture => {
                "no coexistence; invariant laws are mixtures of the boundary laws and the origin"
            }
            RegimeTag::Indeterminate => "threshold equality; long-run behavior not classified",
        }
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Almost-sure limit of `ln X(t) / t` for the population that dies out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionExponent {
    pub species: Species,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub derived: DerivedQuantities,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infected_law: Option<GammaLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uninfected_law: Option<GammaLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extinction_exponent: Option<ExtinctionExponent>,
    /// `false` only for B.3: the weights of the boundary components of an
    /// invariant law cannot be computed analytically, only estimated.
    pub mixture_weights_determined: bool,
}

pub fn classify(params: &ModelParams) -> Result<Regime, ModelError> {
    classify_with_tolerance(params, 0.0)
}

/// Like [`classify`], but any quantity within `tolerance` of a threshold
/// makes the result `Indeterminate`. With `tolerance = 0` only exact zeros
/// of λ_U or λ_I do.
pub fn classify_with_tolerance(params: &ModelParams, tolerance: f64) -> Result<Regime, ModelError> {
    params.validate_positive_density()?;
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(ModelError::InvalidArgument(format!(
            "tolerance must be finite and >= 0, got {tolerance}"
        )));
    }
    let derived = derive(params);
    let tag = tag_for(&derived, params, tolerance);

    let law = |species| stationary_law(params, species).ok();
    let (infected_law, uninfected_law) = match tag {
        RegimeTag::InfectedPersistsUninfectedDies
        | RegimeTag::InfectedPersistsUninfectedDiesHighNoise => (law(Species::Infected), None),
        RegimeTag::InfectedDiesUninfectedPersists => (None, law(Species::Uninfected)),
        RegimeTag::BoundaryMixture => (law(Species::Infected), law(Species::Uninfected)),
        RegimeTag::BothExtinct | RegimeTag::Indeterminate => (None, None),
    };
    let extinction_exponent = exponent_for(tag, &derived, params);

    Ok(Regime {
        tag,
        derived,
        infected_law,
        uninfected_law,
        extinction_exponent,
        mixture_weights_determined: tag != RegimeTag::BoundaryMixture,
    })
}

fn tag_for(derived: &DerivedQuantities, params: &ModelParams, tolerance: f64) -> RegimeTag {
    let near_zero = |x: f64| x == 0.0 || x.abs() < tolerance;
    // strict `<` keeps exact ties inside B.3 when the tolerance is 0
    let near = |a: f64, b: f64| (a - b).abs() < tolerance;

    let lambda_i = derived.lambda_i;
    let lambda_u = derived.lambda_u;
    if near_zero(lambda_u) || near_zero(lambda_i) {
        return RegimeTag::Indeterminate;
    }
    if lambda_u < 0.0 {
        return if lambda_i < 0.0 {
            RegimeTag::BothExtinct
        } else {
            RegimeTag::InfectedPersistsUninfectedDies
        };
    }

    if lambda_i > 0.0 {
        let ratio_i = lambda_i / params.d_i;
        let ratio_u = lambda_u / params.d_u;
        if near(ratio_i, ratio_u) {
            RegimeTag::Indeterminate
        } else if ratio_i > ratio_u {
            RegimeTag::InfectedPersistsUninfectedDiesHighNoise
        } else {
            RegimeTag::BoundaryMixture
        }
    } else {
        let threshold = lambda_u - params.b_u;
        if near(lambda_i, threshold) {
            RegimeTag::Indeterminate
        } else if lambda_i < threshold {
            RegimeTag::InfectedDiesUninfectedPersists
        } else {
            RegimeTag::BoundaryMixture
        }
    }
}

fn exponent_for(
    tag: RegimeTag,
    derived: &DerivedQuantities,
    params: &ModelParams,
) -> Option<ExtinctionExponent> {
    match tag {
        RegimeTag::InfectedPersistsUninfectedDies
        | RegimeTag::InfectedPersistsUninfectedDiesHighNoise => Some(ExtinctionExponent {
            species: Species::Uninfected,
            rate: -params.d_u * derived.lambda_i / params.d_i
                - params.delta_u
                - 0.5 * params.sigma_u * params.sigma_u,
        }),
        RegimeTag::InfectedDiesUninfectedPersists => Some(ExtinctionExponent {
            species: Species::Infected,
            rate: derived.lambda_i - params.d_i * derived.lambda_u / params.d_u,
        }),
        _ => None,
    }
}

/// Exact exponential extinction rate of the losing population.
///
/// A.2 and B.1 give the rate of U, B.2 the rate of I. A.1 only has the upper
/// bounds λ_I and λ_U, and B.3 has none, so both are `NotApplicable`.
pub fn predicted_extinction_exponent(
    params: &ModelParams,
    regime: &Regime,
) -> Result<ExtinctionExponent, ModelError> {
    exponent_for(regime.tag, &derive(params), params).ok_or(ModelError::NotApplicable(regime.tag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_rates(sigma_i: f64, sigma_u: f64) -> ModelParams {
        ModelParams::base_rates().with_noise(sigma_i, sigma_u)
    }

    #[test]
    fn five_worked_cases() {
        let cases = [
            ((1.0, 1.2), RegimeTag::BothExtinct),
            ((0.2, 1.2), RegimeTag::InfectedPersistsUninfectedDies),
            (
                (0.1, 0.5),
                RegimeTag::InfectedPersistsUninfectedDiesHighNoise,
            ),
            ((1.1, 0.5), RegimeTag::InfectedDiesUninfectedPersists),
            ((0.6, 0.5), RegimeTag::BoundaryMixture),
        ];
        for ((si, su), tag) in cases {
            assert_eq!(
                classify(&base_rates(si, su)).unwrap().tag,
                tag,
                "σ=({si},{su})"
            );
        }
    }

    #[test]
    fn attachments() {
        let r = classify(&base_rates(0.2, 1.2)).unwrap();
        let law = r.infected_law.unwrap();
        assert!((law.shape() - 19.0).abs() < 1e-12 && (law.rate() - 0.05).abs() < 1e-15);
        let e = r.extinction_exponent.unwrap();
        assert_eq!(e.species, Species::Uninfected);
        assert!((e.rate + 1.148).abs() < 1e-12);
        assert!(r.mixture_weights_determined);

        let r = classify(&base_rates(0.6, 0.5)).unwrap();
        assert!(!r.mixture_weights_determined);
        assert!(r.infected_law.is_some() && r.uninfected_law.is_some());
        assert!(r.extinction_exponent.is_none());
    }

    #[test]
    fn predicted_exponents() {
        let check = |si, su, species, expected: f64| {
            let p = base_rates(si, su);
            let e = predicted_extinction_exponent(&p, &classify(&p).unwrap()).unwrap();
            assert_eq!(e.species, species);
            assert!(
                (e.rate - expected).abs() < 1e-12,
                "{} vs {expected}",
                e.rate
            );
        };
        check(0.2, 1.2, Species::Uninfected, -1.148);
        check(0.1, 0.5, Species::Uninfected, -0.568);
        check(1.1, 0.5, Species::Infected, -0.582);

        for (si, su) in [(1.0, 1.2), (0.6, 0.5)] {
            let p = base_rates(si, su);
            assert!(matches!(
                predicted_extinction_exponent(&p, &classify(&p).unwrap()),
                Err(ModelError::NotApplicable(_))
            ));
        }
    }

    #[test]
    fn zero_growth_is_indeterminate() {
        // λ_U = 0
        let mut p = ModelParams::base_rates();
        p.delta_u = p.b_u;
        assert_eq!(classify(&p).unwrap().tag, RegimeTag::Indeterminate);
        // λ_I = 0 under λ_U < 0
        let mut p = base_rates(0.0, 1.2);
        p.delta_i = p.b_i;
        assert_eq!(classify(&p).unwrap().tag, RegimeTag::Indeterminate);
        // λ_I = 0 under λ_U > 0
        let mut p = base_rates(0.0, 0.5);
        p.delta_i = p.b_i;
        assert_eq!(classify(&p).unwrap().tag, RegimeTag::Indeterminate);
    }

    #[test]
    fn closed_endpoints_belong_to_boundary_mixture() {
        // λ_I/d_I = λ_U/d_U exactly: b_I = b_U, δ_I = δ_U, no noise
        let p = ModelParams {
            b_i: 0.5,
            b_u: 0.5,
            delta_i: 0.05,
            delta_u: 0.05,
            d_i: 0.001,
            d_u: 0.001,
            sigma_i: 0.0,
            sigma_u: 0.0,
        };
        assert_eq!(classify(&p).unwrap().tag, RegimeTag::BoundaryMixture);
        assert_eq!(
            classify_with_tolerance(&p, 1e-9).unwrap().tag,
            RegimeTag::Indeterminate
        );

        // λ_I = λ_U − b_U exactly, i.e. λ_I = −δ_U when σ_U = 0
        let p = ModelParams {
            b_i: 0.25,
            b_u: 0.5,
            delta_i: 0.5,
            delta_u: 0.25,
            d_i: 0.001,
            d_u: 0.001,
            sigma_i: 0.0,
            sigma_u: 0.0,
        };
        let d = derive(&p);
        assert_eq!(d.lambda_i, d.lambda_u - p.b_u);
        assert_eq!(classify(&p).unwrap().tag, RegimeTag::BoundaryMixture);
    }

    #[test]
    fn tolerance_widens_indeterminate_band() {
        let p = base_rates(0.1, 0.5);
        assert_eq!(
            classify_with_tolerance(&p, 0.0).unwrap().tag,
            RegimeTag::InfectedPersistsUninfectedDiesHighNoise
        );
        // ratios are 395 vs 377
        assert_eq!(
            classify_with_tolerance(&p, 20.0).unwrap().tag,
            RegimeTag::Indeterminate
        );
        assert!(classify_with_tolerance(&p, -1.0).is_err());
    }

    #[test]
    fn zero_density_decay_is_rejected() {
        let mut p = base_rates(0.2, 1.2);
        p.d_u = 0.0;
        assert!(matches!(
            classify(&p),
            Err(ModelError::InvalidParams { field: "d_U", .. })
        ));
    }
}
