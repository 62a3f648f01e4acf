//! Named scenarios on the base rates and seeded runs that compare
//! simulated paths against the model's closed-form predictions.

mod scenarios;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    lyapunov_exponent, occupation_measure, stationary_ks, time_average, AnalysisError,
    OccupationHistogram, DEFAULT_AVERAGE_BURN_IN, DEFAULT_KS_SPACING, DEFAULT_SLOPE_BURN_IN,
};
use crate::model::{classify, GammaLaw, ModelError, ModelParams, RegimeTag, Species, State};
use crate::sde::{run_parallel, simulate_path, SdeError, SimConfig, Trajectory};

pub use scenarios::{builtin_scenarios, find_scenario, EXTINCTION_HORIZON, STATIONARY_HORIZON};

/// Path index of the long single path used by stationary checks.
const STATIONARY_STREAM: u64 = 1 << 32;
/// Bins per axis of the occupation histogram.
pub const DEFAULT_BINS: usize = 100;
/// Fraction of the horizon over which boundary weights are measured.
const BOUNDARY_WINDOW: f64 = 0.2;
/// Level below which a population counts as having reached its boundary.
const BOUNDARY_LEVEL: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid scenario {name}: {reason}")]
    InvalidScenario { name: String, reason: String },
}

/// One comparison between an estimator and a prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    Regime {
        expected: RegimeTag,
    },
    /// Cross-path mean of the final state within `rel_tol` of `target`,
    /// measured in the Euclidean norm relative to `‖target‖`.
    FinalNear {
        target: State,
        rel_tol: f64,
    },
    /// Median over paths of `max(I(T), U(T))` below `threshold`.
    FinalBelow {
        threshold: f64,
    },
    /// Cross-path mean of the fitted `ln X` slope.
    ExtinctionSlope {
        species: Species,
        predicted: f64,
        rel_tol: f64,
    },
    /// K-S test on thinned samples of the long stationary path.
    StationaryKs {
        species: Species,
        law: GammaLaw,
    },
    /// Time average of the long stationary path.
    TimeAverage {
        species: Species,
        predicted: f64,
        rel_tol: f64,
    },
    /// Occupation mass of the lowest marginal bin of the long stationary path.
    LowestBinMass {
        species: Species,
        min_mass: f64,
    },
    /// Ratio `E[min(I, U)](late) / E[min(I, U)](early)` below `max_ratio`.
    MinStatisticDecay {
        early: f64,
        late: f64,
        max_ratio: f64,
    },
    /// Empirical-only: time fractions near each boundary at the end of the
    /// horizon, from the scenario initial state or from `initial`.
    BoundaryWeights {
        initial: Option<State>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub params: ModelParams,
    pub initial: State,
    pub horizon: f64,
    pub n_paths: usize,
    /// Horizon of the long path used by stationary checks.
    pub stationary_horizon: Option<f64>,
    pub dt: f64,
    pub record_stride: usize,
    pub checks: Vec<Check>,
}

impl Scenario {
    /// Configuration of ensemble path `path_index`.
    pub fn sim_config(&self, master_seed: u64) -> SimConfig {
        SimConfig {
            dt: self.dt,
            record_stride: self.record_stride,
            ..SimConfig::new(self.initial, self.horizon, master_seed)
        }
    }

    fn stationary_config(&self, master_seed: u64) -> SimConfig {
        SimConfig {
            horizon: self.stationary_horizon.unwrap_or(self.horizon),
            ..self.sim_config(master_seed)
        }
        .with_path_index(STATIONARY_STREAM)
    }

    fn invalid(&self, reason: impl Into<String>) -> ExperimentError {
        ExperimentError::InvalidScenario {
            name: self.name.clone(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.params.validate()?;
        if self.n_paths == 0 {
            return Err(self.invalid("n_paths must be >= 1"));
        }
        if let Some(t) = self.stationary_horizon {
            if !(t.is_finite() && t > 0.0) {
                return Err(self.invalid(format!("stationary horizon must be > 0, got {t}")));
            }
        }
        self.sim_config(0).validate()?;
        for check in &self.checks {
            if let Check::MinStatisticDecay { early, late, .. } = check {
                if !(0.0 <= *early && early < late && *late <= self.horizon) {
                    return Err(self.invalid(format!(
                        "min-statistic times must satisfy 0 <= early < late <= horizon, got {early}, {late}"
                    )));
                }
            }
            if let Check::BoundaryWeights { initial: Some(s) } = check {
                if !s.is_valid() {
                    return Err(self.invalid(format!("invalid sweep initial state {s:?}")));
                }
            }
        }
        Ok(())
    }

    fn needs_stationary_path(&self) -> bool {
        self.checks.iter().any(|c| {
            matches!(
                c,
                Check::StationaryKs { .. }
                    | Check::TimeAverage { .. }
                    | Check::LowestBinMass { .. }
            )
        })
    }

    fn needs_ensemble(&self) -> bool {
        self.checks.iter().any(|c| {
            matches!(
                c,
                Check::FinalNear { .. }
                    | Check::FinalBelow { .. }
                    | Check::ExtinctionSlope { .. }
                    | Check::MinStatisticDecay { .. }
                    | Check::BoundaryWeights { initial: None }
            )
        })
    }
}

/// Time fractions of the terminal window spent in each region.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWeights {
    /// `I < 1` and `U < 1`.
    pub origin: f64,
    /// `I < 1 <= U`: near the uninfected-only boundary.
    pub uninfected_only: f64,
    /// `U < 1 <= I`: near the infected-only boundary.
    pub infected_only: f64,
    pub interior: f64,
}

impl BoundaryWeights {
    fn of_path(traj: &Trajectory) -> Self {
        let from = traj.index_at_or_after((1.0 - BOUNDARY_WINDOW) * traj.end_time());
        let n = (traj.len() - from) as f64;
        let mut w = BoundaryWeights::default();
        for (&i, &u) in traj.infected()[from..]
            .iter()
            .zip(&traj.uninfected()[from..])
        {
            match (i < BOUNDARY_LEVEL, u < BOUNDARY_LEVEL) {
                (true, true) => w.origin += 1.0,
                (true, false) => w.uninfected_only += 1.0,
                (false, true) => w.infected_only += 1.0,
                (false, false) => w.interior += 1.0,
            }
        }
        w.scaled(1.0 / n)
    }

    fn scaled(self, k: f64) -> Self {
        BoundaryWeights {
            origin: self.origin * k,
            uninfected_only: self.uninfected_only * k,
            infected_only: self.infected_only * k,
            interior: self.interior * k,
        }
    }

    fn mean(all: impl Iterator<Item = BoundaryWeights>) -> Self {
        let mut sum = BoundaryWeights::default();
        let mut n = 0usize;
        for w in all {
            sum.origin += w.origin;
            sum.uninfected_only += w.uninfected_only;
            sum.infected_only += w.infected_only;
            sum.interior += w.interior;
            n += 1;
        }
        sum.scaled(1.0 / n as f64)
    }
}

/// A measured or predicted value in a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
    Law(GammaLaw),
    Point(State),
    Weights(BoundaryWeights),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: Option<Quantity>,
    pub predicted: Option<Quantity>,
    pub tolerance: Option<f64>,
    /// `None` for empirical-only checks, which never affect the overall verdict.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckOutcome {
    fn new(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            measured: None,
            predicted: None,
            tolerance: None,
            pass: None,
            note: None,
        }
    }

    fn failed(mut self, note: impl ToString) -> Self {
        self.pass = Some(false);
        self.note = Some(note.to_string());
        self
    }

    pub fn is_empirical(&self) -> bool {
        self.pass.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: String,
    pub master_seed: u64,
    /// Path indices of every noise stream used, in the order they were run.
    pub path_indices: Vec<u64>,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
    /// Not serialized, so that the JSON form depends only on the scenario and seed.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl Verdict {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.pass == Some(false))
    }
}

/// Everything a run produces besides the verdict.
#[derive(Debug, Clone)]
pub struct ScenarioArtifacts {
    /// The long stationary path if the scenario has one, else ensemble path 0.
    pub trajectory: Trajectory,
    /// Occupation histogram of `trajectory` after burn-in.
    pub histogram: OccupationHistogram,
}

/// Per-path reductions, so ensembles never need to be held in memory.
#[derive(Debug, Clone)]
struct PathSummary {
    final_state: State,
    slopes: Vec<Result<f64, AnalysisError>>,
    min_at: Vec<(f64, f64)>,
    weights: BoundaryWeights,
    well_formed: bool,
}

fn summarize(traj: &Trajectory, slope_species: &[Species], min_times: &[f64]) -> PathSummary {
    PathSummary {
        final_state: traj.final_state,
        slopes: slope_species
            .iter()
            .map(|&s| lyapunov_exponent(traj, s, DEFAULT_SLOPE_BURN_IN).map(|e| e.slope))
            .collect(),
        min_at: min_times
            .iter()
            .map(|&t| {
                let s = traj.state(traj.nearest_index(t));
                (t, s.infected.min(s.uninfected))
            })
            .collect(),
        weights: BoundaryWeights::of_path(traj),
        well_formed: is_well_formed(traj),
    }
}

fn is_well_formed(traj: &Trajectory) -> bool {
    traj.is_nonnegative() && traj.respects_absorption()
}

fn run_family(
    config: &SimConfig,
    params: &ModelParams,
    n_paths: usize,
    family: u64,
    parallelism: usize,
    slope_species: &[Species],
    min_times: &[f64],
) -> Result<Vec<PathSummary>, SdeError> {
    run_parallel(parallelism, n_paths, |i| {
        let traj = simulate_path(&config.with_path_index(family | i as u64), params)?;
        Ok(summarize(&traj, slope_species, min_times))
    })
}

fn relative_error(measured: f64, predicted: f64) -> f64 {
    ((measured - predicted) / predicted).abs()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Runs every path the scenario needs and evaluates its checks.
///
/// The verdict depends only on `(scenario, master_seed)`; `parallelism`
/// only sets the number of worker threads.
pub fn run_scenario(
    scenario: &Scenario,
    master_seed: u64,
    parallelism: usize,
) -> Result<Verdict, ExperimentError> {
    run_scenario_with_artifacts(scenario, master_seed, parallelism).map(|(v, _)| v)
}

pub fn run_scenario_with_artifacts(
    scenario: &Scenario,
    master_seed: u64,
    parallelism: usize,
) -> Result<(Verdict, ScenarioArtifacts), ExperimentError> {
    let started = Instant::now();
    scenario.validate()?;
    let params = &scenario.params;
    let config = scenario.sim_config(master_seed);
    let mut path_indices = Vec::new();

    let slope_species: Vec<Species> = scenario
        .checks
        .iter()
        .filter_map(|c| match c {
            Check::ExtinctionSlope { species, .. } => Some(*species),
            _ => None,
        })
        .collect();
    let min_times: Vec<f64> = scenario
        .checks
        .iter()
        .flat_map(|c| match c {
            Check::MinStatisticDecay { early, late, .. } => vec![*early, *late],
            _ => vec![],
        })
        .collect();

    let ensemble = if scenario.needs_ensemble() {
        path_indices.extend(0..scenario.n_paths as u64);
        run_family(
            &config,
            params,
            scenario.n_paths,
            0,
            parallelism,
            &slope_species,
            &min_times,
        )?
    } else {
        Vec::new()
    };

    let stationary = if scenario.needs_stationary_path() {
        let c = scenario.stationary_config(master_seed);
        path_indices.push(c.path_index);
        Some(simulate_path(&c, params)?)
    } else {
        None
    };
    let stationary_window = stationary
        .as_ref()
        .map(|t| t.after(DEFAULT_AVERAGE_BURN_IN * t.end_time()));
    let histogram = stationary_window
        .as_ref()
        .map(|t| occupation_measure(t, (DEFAULT_BINS, DEFAULT_BINS)));

    let mut well_formed =
        ensemble.iter().all(|p| p.well_formed) && stationary.as_ref().is_none_or(is_well_formed);
    let mut outcomes = Vec::with_capacity(scenario.checks.len() + 1);
    let mut slope_slot = 0;
    let mut min_slot = 0;

    for (k, check) in scenario.checks.iter().enumerate() {
        let outcome = match check {
            Check::Regime { expected } => {
                let tag = classify(params)?.tag;
                CheckOutcome {
                    measured: Some(Quantity::Text(tag.code().into())),
                    predicted: Some(Quantity::Text(expected.code().into())),
                    pass: Some(tag == *expected),
                    ..CheckOutcome::new("regime")
                }
            }
            Check::FinalNear { target, rel_tol } => {
                let n = ensemble.len() as f64;
                let mean = State::new(
                    ensemble.iter().map(|p| p.final_state.infected).sum::<f64>() / n,
                    ensemble
                        .iter()
                        .map(|p| p.final_state.uninfected)
                        .sum::<f64>()
                        / n,
                );
                let err = mean.distance(target) / target.norm();
                CheckOutcome {
                    measured: Some(Quantity::Point(mean)),
                    predicted: Some(Quantity::Point(*target)),
                    tolerance: Some(*rel_tol),
                    pass: Some(err <= *rel_tol),
                    ..CheckOutcome::new("final state")
                }
            }
            Check::FinalBelow { threshold } => {
                let m = median(
                    ensemble
                        .iter()
                        .map(|p| p.final_state.infected.max(p.final_state.uninfected))
                        .collect(),
                );
                CheckOutcome {
                    measured: Some(Quantity::Number(m)),
                    predicted: Some(Quantity::Number(0.0)),
                    tolerance: Some(*threshold),
                    pass: Some(m < *threshold),
                    ..CheckOutcome::new("median final max(I, U)")
                }
            }
            Check::ExtinctionSlope {
                species,
                predicted,
                rel_tol,
            } => {
                let slot = slope_slot;
                slope_slot += 1;
                let base = CheckOutcome {
                    predicted: Some(Quantity::Number(*predicted)),
                    tolerance: Some(*rel_tol),
                    ..CheckOutcome::new(format!("{species} slope"))
                };
                let slopes: Result<Vec<f64>, _> =
                    ensemble.iter().map(|p| p.slopes[slot].clone()).collect();
                match slopes {
                    Ok(s) => {
                        let mean = s.iter().sum::<f64>() / s.len() as f64;
                        CheckOutcome {
                            measured: Some(Quantity::Number(mean)),
                            pass: Some(relative_error(mean, *predicted) <= *rel_tol),
                            ..base
                        }
                    }
                    Err(e) => base.failed(e),
                }
            }
            Check::StationaryKs { species, law } => {
                let traj = stationary.as_ref().expect("stationary path was simulated");
                let base = CheckOutcome {
                    predicted: Some(Quantity::Law(*law)),
                    ..CheckOutcome::new(format!("{species} K-S"))
                };
                match stationary_ks(
                    traj,
                    *species,
                    law,
                    DEFAULT_AVERAGE_BURN_IN,
                    DEFAULT_KS_SPACING,
                ) {
                    Ok(r) => CheckOutcome {
                        measured: Some(Quantity::Number(r.statistic)),
                        tolerance: Some(r.critical),
                        pass: Some(r.pass),
                        note: Some(format!("n = {}", r.n)),
                        ..base
                    },
                    Err(e) => base.failed(e),
                }
            }
            Check::TimeAverage {
                species,
                predicted,
                rel_tol,
            } => {
                let traj = stationary.as_ref().expect("stationary path was simulated");
                let base = CheckOutcome {
                    predicted: Some(Quantity::Number(*predicted)),
                    tolerance: Some(*rel_tol),
                    ..CheckOutcome::new(format!("{species} time average"))
                };
                match time_average(traj, *species, 1.0, DEFAULT_AVERAGE_BURN_IN) {
                    Ok(avg) => CheckOutcome {
                        measured: Some(Quantity::Number(avg)),
                        pass: Some(relative_error(avg, *predicted) <= *rel_tol),
                        ..base
                    },
                    Err(e) => base.failed(e),
                }
            }
            Check::LowestBinMass { species, min_mass } => {
                let h = histogram.as_ref().expect("stationary path was simulated");
                let mass = h.lowest_bin_mass(*species);
                CheckOutcome {
                    measured: Some(Quantity::Number(mass)),
                    predicted: Some(Quantity::Number(1.0)),
                    tolerance: Some(*min_mass),
                    pass: Some(mass >= *min_mass),
                    ..CheckOutcome::new(format!("{species} lowest-bin occupation"))
                }
            }
            Check::MinStatisticDecay {
                early,
                late,
                max_ratio,
            } => {
                let slot = min_slot;
                min_slot += 2;
                let n = ensemble.len() as f64;
                let at = |j: usize| ensemble.iter().map(|p| p.min_at[j].1).sum::<f64>() / n;
                let (e, l) = (at(slot), at(slot + 1));
                let ratio = if e > 0.0 { l / e } else { 0.0 };
                CheckOutcome {
                    measured: Some(Quantity::Number(ratio)),
                    predicted: Some(Quantity::Number(0.0)),
                    tolerance: Some(*max_ratio),
                    pass: Some(ratio < *max_ratio),
                    note: Some(format!(
                        "E[min(I, U)] = {e} at t = {early}, {l} at t = {late}"
                    )),
                    ..CheckOutcome::new("min-statistic decay")
                }
            }
            Check::BoundaryWeights { initial } => {
                let (start, summaries) = match initial {
                    None => (scenario.initial, None),
                    Some(s) => {
                        let family = (k as u64 + 2) << 32;
                        path_indices.extend((0..scenario.n_paths as u64).map(|i| family | i));
                        let c = SimConfig {
                            initial: *s,
                            ..config
                        };
                        let runs = run_family(
                            &c,
                            params,
                            scenario.n_paths,
                            family,
                            parallelism,
                            &[],
                            &[],
                        )?;
                        well_formed &= runs.iter().all(|p| p.well_formed);
                        (*s, Some(runs))
                    }
                };
                let weights = BoundaryWeights::mean(
                    summaries
                        .as_deref()
                        .unwrap_or(&ensemble)
                        .iter()
                        .map(|p| p.weights),
                );
                CheckOutcome {
                    measured: Some(Quantity::Weights(weights)),
                    note: Some("empirical only".into()),
                    ..CheckOutcome::new(format!(
                        "boundary weights from ({}, {})",
                        start.infected, start.uninfected
                    ))
                }
            }
        };
        outcomes.push(outcome);
    }

    outcomes.push(CheckOutcome {
        measured: Some(Quantity::Text(
            if well_formed { "ok" } else { "violated" }.into(),
        )),
        pass: Some(well_formed),
        ..CheckOutcome::new("nonnegativity and absorption")
    });

    let trajectory = match stationary {
        Some(t) => t,
        None => simulate_path(&config, params)?,
    };
    let histogram = match histogram {
        Some(h) => h,
        None => occupation_measure(
            &trajectory.after(DEFAULT_AVERAGE_BURN_IN * trajectory.end_time()),
            (DEFAULT_BINS, DEFAULT_BINS),
        ),
    };
    let pass = outcomes.iter().all(|c| c.pass != Some(false));
    let verdict = Verdict {
        scenario: scenario.name.clone(),
        master_seed,
        path_indices,
        checks: outcomes,
        pass,
        wall_clock: started.elapsed(),
    };
    Ok((
        verdict,
        ScenarioArtifacts {
            trajectory,
            histogram,
        },
    ))
}

/// Cross-path statistics of one species at each grid time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub q10: Vec<f64>,
    pub q50: Vec<f64>,
    pub q90: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub times: Vec<f64>,
    pub infected: SeriesStats,
    pub uninfected: SeriesStats,
    /// Cross-path mean of `min(I, U)`.
    pub mean_min: Vec<f64>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn series_stats(paths: &[Trajectory], species: Species) -> SeriesStats {
    let len = paths[0].len();
    let n = paths.len() as f64;
    let mut stats = SeriesStats {
        mean: Vec::with_capacity(len),
        q10: Vec::with_capacity(len),
        q50: Vec::with_capacity(len),
        q90: Vec::with_capacity(len),
    };
    let mut column = Vec::with_capacity(paths.len());
    for k in 0..len {
        column.clear();
        column.extend(paths.iter().map(|p| p.values(species)[k]));
        stats.mean.push(column.iter().sum::<f64>() / n);
        column.sort_by(f64::total_cmp);
        stats.q10.push(quantile_sorted(&column, 0.1));
        stats.q50.push(quantile_sorted(&column, 0.5));
        stats.q90.push(quantile_sorted(&column, 0.9));
    }
    stats
}

/// Mean and 10/50/90% quantiles of `I` and `U`, and the mean of `min(I, U)`,
/// across `n_paths` ensemble paths of `scenario` at every recorded time.
pub fn ensemble_summary(
    scenario: &Scenario,
    n_paths: usize,
    master_seed: u64,
    parallelism: usize,
) -> Result<EnsembleSummary, ExperimentError> {
    if n_paths == 0 {
        return Err(scenario.invalid("n_paths must be >= 1"));
    }
    scenario.validate()?;
    let config = scenario.sim_config(master_seed);
    let paths = run_parallel(parallelism, n_paths, |i| {
        simulate_path(&config.with_path_index(i as u64), &scenario.params)
    })?;
    let n = n_paths as f64;
    let mean_min = (0..paths[0].len())
        .map(|k| {
            paths
                .iter()
                .map(|p| p.infected()[k].min(p.uninfected()[k]))
                .sum::<f64>()
                / n
        })
        .collect();
    Ok(EnsembleSummary {
        times: paths[0].times().to_vec(),
        infected: series_stats(&paths, Species::Infected),
        uninfected: series_stats(&paths, Species::Uninfected),
        mean_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(name: &str, sigma: (f64, f64), initial: State) -> Scenario {
        Scenario {
            name: name.into(),
            description: String::new(),
            params: ModelParams::base_rates().with_noise(sigma.0, sigma.1),
            initial,
            horizon: 2.0,
            n_paths: 3,
            stationary_horizon: None,
            dt: 1e-3,
            record_stride: 10,
            checks: Vec::new(),
        }
    }

    #[test]
    fn eight_builtin_scenarios_on_base_rates_rates() {
        let all = builtin_scenarios();
        let names: Vec<_> = all.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "det-case-1",
                "det-case-2",
                "stoch-A1",
                "stoch-A2",
                "stoch-B1",
                "stoch-B2",
                "stoch-B3",
                "B3-initial-sweep"
            ]
        );
        for s in &all {
            let base = ModelParams::base_rates();
            let p = s.params;
            assert_eq!(
                (p.b_i, p.b_u, p.delta_i, p.delta_u, p.d_i, p.d_u),
                (
                    base.b_i,
                    base.b_u,
                    base.delta_i,
                    base.delta_u,
                    base.d_i,
                    base.d_u
                )
            );
            s.validate().unwrap();
        }
    }

    #[test]
    fn stochastic_regime_checks_match_classifier() {
        for s in builtin_scenarios() {
            for c in &s.checks {
                if let Check::Regime { expected } = c {
                    assert_eq!(classify(&s.params).unwrap().tag, *expected, "{}", s.name);
                }
            }
        }
    }

    #[test]
    fn a2_scenario_contents() {
        let s = find_scenario("stoch-A2").unwrap();
        assert_eq!((s.params.sigma_i, s.params.sigma_u), (0.2, 1.2));
        assert!(s.checks.contains(&Check::Regime {
            expected: RegimeTag::InfectedPersistsUninfectedDies
        }));
        assert!(s.checks.iter().any(|c| matches!(c,
            Check::StationaryKs { species: Species::Infected, law }
                if (law.shape() - 19.0).abs() < 1e-12 && (law.rate() - 0.05).abs() < 1e-12)));
        assert!(s.checks.iter().any(|c| matches!(c,
            Check::ExtinctionSlope { species: Species::Uninfected, predicted, rel_tol }
                if (predicted + 1.148).abs() < 1e-12 && *rel_tol == 0.15)));
        assert!(find_scenario("nope").is_none());
    }

    #[test]
    fn verdict_is_independent_of_parallelism() {
        let mut s = tiny("t", (0.6, 0.5), State::new(120.0, 500.0));
        s.checks = vec![
            Check::FinalBelow { threshold: 1e9 },
            Check::MinStatisticDecay {
                early: 0.5,
                late: 2.0,
                max_ratio: 10.0,
            },
            Check::BoundaryWeights {
                initial: Some(State::new(10.0, 50.0)),
            },
        ];
        let a = run_scenario(&s, 3, 1).unwrap();
        let b = run_scenario(&s, 3, 4).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.pass);
        assert_eq!(a.path_indices.len(), 6);
        assert!(a.checks[2].is_empirical());
    }

    #[test]
    fn overall_pass_ignores_empirical_checks_only() {
        let mut s = tiny("t", (0.0, 0.0), State::new(100.0, 500.0));
        s.checks = vec![
            Check::BoundaryWeights { initial: None },
            Check::FinalBelow { threshold: 1.0 },
        ];
        let v = run_scenario(&s, 0, 1).unwrap();
        assert!(!v.pass);
        assert_eq!(v.failed_checks().count(), 1);
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let mut s = tiny("t", (0.1, 0.1), State::new(1.0, 1.0));
        s.n_paths = 0;
        assert!(matches!(
            run_scenario(&s, 0, 1),
            Err(ExperimentError::InvalidScenario { .. })
        ));
        let mut s = tiny("t", (0.1, 0.1), State::new(1.0, 1.0));
        s.checks = vec![Check::MinStatisticDecay {
            early: 1.0,
            late: 5.0,
            max_ratio: 0.1,
        }];
        assert!(run_scenario(&s, 0, 1).is_err());
    }

    #[test]
    fn single_path_summary_has_degenerate_quantiles() {
        let s = tiny("t", (0.5, 0.5), State::new(100.0, 500.0));
        let sum = ensemble_summary(&s, 1, 9, 1).unwrap();
        for st in [&sum.infected, &sum.uninfected] {
            assert_eq!(st.mean, st.q10);
            assert_eq!(st.q10, st.q50);
            assert_eq!(st.q50, st.q90);
        }
    }

    #[test]
    fn origin_summary_is_zero() {
        let s = tiny("t", (0.5, 0.5), State::ORIGIN);
        let sum = ensemble_summary(&s, 4, 1, 2).unwrap();
        assert!(sum.mean_min.iter().all(|&v| v == 0.0));
        assert!(sum
            .infected
            .q90
            .iter()
            .chain(&sum.uninfected.q90)
            .all(|&v| v == 0.0));
        assert_eq!(sum.times.len(), 201);
    }

    #[test]
    fn quantiles_interpolate() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.5), 2.0);
        assert!((quantile_sorted(&xs, 0.1) - 0.4).abs() < 1e-15);
        assert_eq!(median(vec![3.0, 1.0, 2.0, 10.0]), 2.5);
    }
}
