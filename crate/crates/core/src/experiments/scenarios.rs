use super::{Check, Scenario};
use crate::model::{
    classify, equilibria, long_run_mean, predicted_extinction_exponent, stationary_law,
    ModelParams, RegimeTag, Species, State,
};
use crate::sde::{DEFAULT_DT, DEFAULT_RECORD_STRIDE};

/// Horizon for extinction and transient checks.
pub const EXTINCTION_HORIZON: f64 = 300.0;
/// Horizon of the long single path used for stationary checks.
pub const STATIONARY_HORIZON: f64 = 2000.0;

const SLOPE_TOLERANCE: f64 = 0.15;
const DETERMINISTIC_TOLERANCE: f64 = 0.01;

fn base(name: &str, description: &str, sigma: (f64, f64), initial: State) -> Scenario {
    Scenario {
        name: name.to_string(),
        description: description.to_string(),
        params: ModelParams::base_rates().with_noise(sigma.0, sigma.1),
        initial,
        horizon: EXTINCTION_HORIZON,
        n_paths: 20,
        stationary_horizon: None,
        dt: DEFAULT_DT,
        record_stride: DEFAULT_RECORD_STRIDE,
        checks: Vec::new(),
    }
}

fn regime_check(expected: RegimeTag) -> Check {
    Check::Regime { expected }
}

fn slope_check(params: &ModelParams) -> Check {
    let regime = classify(params).expect("built-in parameters are valid");
    let exponent =
        predicted_extinction_exponent(params, &regime).expect("regime has an exact exponent");
    Check::ExtinctionSlope {
        species: exponent.species,
        predicted: exponent.rate,
        rel_tol: SLOPE_TOLERANCE,
    }
}

fn ks_check(params: &ModelParams, species: Species) -> Check {
    Check::StationaryKs {
        species,
        law: stationary_law(params, species).expect("persistent species has a stationary law"),
    }
}

fn mean_check(params: &ModelParams, species: Species, rel_tol: f64) -> Check {
    Check::TimeAverage {
        species,
        predicted: long_run_mean(params, species).expect("persistent species"),
        rel_tol,
    }
}

/// The eight reference scenarios on the base rates.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let low_infection = State::new(100.0, 500.0);
    let high_infection = State::new(120.0, 500.0);
    let eq = equilibria(&ModelParams::base_rates()).expect("base rates are valid");

    let mut det1 = base(
        "det-case-1",
        "noiseless model from (100, 500): infection dies out, approach to E1",
        (0.0, 0.0),
        low_infection,
    );
    det1.horizon = 600.0;
    det1.n_paths = 1;
    det1.checks = vec![Check::FinalNear {
        target: eq.e1.expect("E1 exists"),
        rel_tol: DETERMINISTIC_TOLERANCE,
    }];

    let mut det2 = base(
        "det-case-2",
        "noiseless model from (120, 500): Wolbachia takes over, approach to E2",
        (0.0, 0.0),
        high_infection,
    );
    det2.horizon = 600.0;
    det2.n_paths = 1;
    det2.checks = vec![Check::FinalNear {
        target: eq.e2.expect("E2 exists"),
        rel_tol: DETERMINISTIC_TOLERANCE,
    }];

    let mut a1 = base(
        "stoch-A1",
        "σ_I = 1, σ_U = 1.2: both populations go extinct",
        (1.0, 1.2),
        low_infection,
    );
    a1.checks = vec![
        regime_check(RegimeTag::BothExtinct),
        Check::FinalBelow { threshold: 1e-3 },
    ];

    let mut a2 = base(
        "stoch-A2",
        "σ_I = 0.2, σ_U = 1.2: infected persists with law Ga(19, 0.05), uninfected dies out",
        (0.2, 1.2),
        low_infection,
    );
    a2.horizon = 200.0;
    a2.stationary_horizon = Some(STATIONARY_HORIZON);
    a2.checks = vec![
        regime_check(RegimeTag::InfectedPersistsUninfectedDies),
        ks_check(&a2.params, Species::Infected),
        slope_check(&a2.params),
        mean_check(&a2.params, Species::Infected, 0.05),
        Check::LowestBinMass {
            species: Species::Uninfected,
            min_mass: 0.9,
        },
    ];

    let mut b1 = base(
        "stoch-B1",
        "σ_I = 0.1, σ_U = 0.5: infected persists with law Ga(79, 0.2), uninfected dies out",
        (0.1, 0.5),
        high_infection,
    );
    b1.stationary_horizon = Some(STATIONARY_HORIZON);
    b1.checks = vec![
        regime_check(RegimeTag::InfectedPersistsUninfectedDiesHighNoise),
        ks_check(&b1.params, Species::Infected),
        slope_check(&b1.params),
        mean_check(&b1.params, Species::Infected, 0.05),
        Check::LowestBinMass {
            species: Species::Uninfected,
            min_mass: 0.9,
        },
    ];

    let mut b2 = base(
        "stoch-B2",
        "σ_I = 1.1, σ_U = 0.5: infected dies out, uninfected persists",
        (1.1, 0.5),
        high_infection,
    );
    b2.stationary_horizon = Some(STATIONARY_HORIZON);
    b2.checks = vec![
        regime_check(RegimeTag::InfectedDiesUninfectedPersists),
        slope_check(&b2.params),
        mean_check(&b2.params, Species::Uninfected, 0.10),
        Check::LowestBinMass {
            species: Species::Infected,
            min_mass: 0.9,
        },
    ];

    let mut b3 = base(
        "stoch-B3",
        "σ_I = 0.6, σ_U = 0.5: no coexistence, E[min(I, U)] decays to 0",
        (0.6, 0.5),
        high_infection,
    );
    b3.horizon = 150.0;
    b3.n_paths = 200;
    b3.checks = vec![
        regime_check(RegimeTag::BoundaryMixture),
        Check::MinStatisticDecay {
            early: 5.0,
            late: 150.0,
            max_ratio: 0.1,
        },
        Check::BoundaryWeights { initial: None },
    ];

    let mut sweep = base(
        "B3-initial-sweep",
        "σ_I = 0.6, σ_U = 0.5: empirical boundary weights for several initial states",
        (0.6, 0.5),
        high_infection,
    );
    sweep.n_paths = 40;
    sweep.checks = std::iter::once(regime_check(RegimeTag::BoundaryMixture))
        .chain(
            [(10.0, 500.0), (100.0, 50.0), (100.0, 500.0), (12.0, 50.0)]
                .into_iter()
                .map(|(i, u)| Check::BoundaryWeights {
                    initial: Some(State::new(i, u)),
                }),
        )
        .collect();

    vec![det1, det2, a1, a2, b1, b2, b3, sweep]
}

pub fn find_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}
