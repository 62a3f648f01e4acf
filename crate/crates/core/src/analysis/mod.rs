//! Estimators that compare simulated paths with the closed-form predictions:
//! Lyapunov exponents, ergodic time averages, occupation measures and a
//! Kolmogorov–Smirnov test against Gamma laws.

mod ks;
mod occupation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GammaLaw, Species};
use crate::sde::Trajectory;

pub use ks::{gamma_cdf, ks_statistic, ks_test, KsResult, KS_COEFFICIENT_05, KS_MIN_SAMPLES};
pub use occupation::{occupation_measure, OccupationHistogram};

/// Burn-in fraction used for time averages and occupation measures.
pub const DEFAULT_AVERAGE_BURN_IN: f64 = 0.1;
/// Burn-in fraction used for slope fits.
pub const DEFAULT_SLOPE_BURN_IN: f64 = 0.2;
/// Spacing between stationary samples fed to the K-S test, in time units.
pub const DEFAULT_KS_SPACING: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("no usable points in the fit window starting at t = {start}")]
    EmptyWindow { start: f64 },
    #[error("too few samples for the asymptotic K-S test: {n} < {min}")]
    TooFewSamples { n: usize, min: usize },
    #[error("invalid sample {value} at position {index}: samples must be finite and > 0")]
    InvalidSample { index: usize, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Least-squares slope of `ln X(t)` against `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub std_error: f64,
    pub burn_in_fraction: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

fn check_fraction(burn_in_fraction: f64) -> Result<(), AnalysisError> {
    if (0.0..1.0).contains(&burn_in_fraction) {
        Ok(())
    } else {
        Err(AnalysisError::InvalidArgument(format!(
            "burn-in fraction must lie in [0, 1), got {burn_in_fraction}"
        )))
    }
}

/// OLS fit of `ln X` over `[burn_in·T, T]`, cut at the first recorded zero.
pub fn lyapunov_exponent(
    traj: &Trajectory,
    species: Species,
    burn_in_fraction: f64,
) -> Result<SlopeEstimate, AnalysisError> {
    check_fraction(burn_in_fraction)?;
    let start = burn_in_fraction * traj.end_time();
    let first = traj.index_at_or_after(start);
    let values = traj.values(species);
    let times = traj.times();
    let last = values[first..]
        .iter()
        .position(|&v| v <= 0.0)
        .map_or(values.len(), |p| first + p);
    if last < first + 2 {
        return Err(AnalysisError::EmptyWindow { start });
    }

    let t = &times[first..last];
    // shifted by the first log value so a constant path fits exactly
    let y0 = values[first].ln();
    let y: Vec<f64> = values[first..last].iter().map(|v| v.ln() - y0).collect();
    let n = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(&y) {
        let dt = ti - t_mean;
        sxx += dt * dt;
        sxy += dt * (yi - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let std_error = if t.len() > 2 {
        let ssr: f64 = t
            .iter()
            .zip(&y)
            .map(|(&ti, &yi)| {
                let r = yi - intercept - slope * ti;
                r * r
            })
            .sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeEstimate {
        slope,
        std_error,
        burn_in_fraction,
        window: (t[0], t[t.len() - 1]),
        n_points: t.len(),
    })
}

/// Trapezoidal time average of `X^p` over `[burn_in·T, T]`.
pub fn time_average(
    traj: &Trajectory,
    species: Species,
    p: f64,
    burn_in_fraction: f64,
) -> Result<f64, AnalysisError> {
    check_fraction(burn_in_fraction)?;
    if !(p.is_finite() && p > 0.0) {
        return Err(AnalysisError::InvalidArgument(format!(
            "moment order must be finite and > 0, got {p}"
        )));
    }
    let first = traj
        .index_at_or_after(burn_in_fraction * traj.end_time())
        .min(traj.len() - 1);
    let t = &traj.times()[first..];
    let x = &traj.values(species)[first..];
    let pow = |v: f64| if p == 1.0 { v } else { v.powf(p) };
    if t.len() == 1 {
        return Ok(pow(x[0]));
    }
    let mut integral = 0.0;
    for k in 0..t.len() - 1 {
        integral += 0.5 * (pow(x[k]) + pow(x[k + 1])) * (t[k + 1] - t[k]);
    }
    Ok(integral / (t[t.len() - 1] - t[0]))
}

/// Recorded values of `species` after burn-in, one every `spacing` time
/// units, for goodness-of-fit tests on nearly independent draws.
pub fn thinned_samples(
    traj: &Trajectory,
    species: Species,
    burn_in_fraction: f64,
    spacing: f64,
) -> Result<Vec<f64>, AnalysisError> {
    check_fraction(burn_in_fraction)?;
    let record_dt = traj.config.record_dt();
    if !(spacing.is_finite() && spacing >= record_dt) {
        return Err(AnalysisError::InvalidArgument(format!(
            "sample spacing {spacing} is below the recording interval {record_dt}"
        )));
    }
    let every = (spacing / record_dt).round() as usize;
    let first = traj.index_at_or_after(burn_in_fraction * traj.end_time());
    Ok(traj.values(species)[first..]
        .iter()
        .step_by(every)
        .copied()
        .collect())
}

/// Monte Carlo estimate of `E[min(I(t), U(t))]` at the recorded time nearest `t`.
pub fn min_statistic(ensemble: &[Trajectory], t: f64) -> Result<f64, AnalysisError> {
    if ensemble.is_empty() {
        return Err(AnalysisError::InvalidArgument("empty ensemble".into()));
    }
    let sum: f64 = ensemble
        .iter()
        .map(|traj| {
            let s = traj.state(traj.nearest_index(t));
            s.infected.min(s.uninfected)
        })
        .sum();
    Ok(sum / ensemble.len() as f64)
}

/// Convenience wrapper: K-S test of the thinned stationary samples of a
/// trajectory against `law`.
pub fn stationary_ks(
    traj: &Trajectory,
    species: Species,
    law: &GammaLaw,
    burn_in_fraction: f64,
    spacing: f64,
) -> Result<KsResult, AnalysisError> {
    let samples = thinned_samples(traj, species, burn_in_fraction, spacing)?;
    ks_test(&samples, law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::sde::SimConfig;

    pub(crate) fn synthetic(times: Vec<f64>, i: Vec<f64>, u: Vec<f64>) -> Trajectory {
        let config = SimConfig {
            dt: times.get(1).copied().unwrap_or(1.0) - times[0],
            record_stride: 1,
            ..SimConfig::default()
        };
        Trajectory::from_columns(times, i, u, config, ModelParams::base_rates())
    }

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn constant_path_has_zero_slope() {
        let t = grid(101, 0.1);
        let traj = synthetic(t.clone(), vec![3.0; 101], vec![7.0; 101]);
        let est = lyapunov_exponent(&traj, Species::Infected, 0.2).unwrap();
        assert_eq!(est.slope, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn exponential_path_has_exact_slope() {
        let t = grid(1001, 0.01);
        let x: Vec<f64> = t.iter().map(|&s| (-s).exp()).collect();
        let traj = synthetic(t, x.clone(), x);
        let est = lyapunov_exponent(&traj, Species::Uninfected, 0.2).unwrap();
        assert!((est.slope + 1.0).abs() < 1e-12, "{}", est.slope);
        assert!(est.std_error < 1e-12);
        assert!(est.window.0 >= 2.0 && est.window.1 == 10.0);
    }

    #[test]
    fn window_stops_at_first_zero() {
        let t = grid(11, 1.0);
        let mut x: Vec<f64> = t.iter().map(|&s| (-2.0 * s).exp()).collect();
        for v in &mut x[6..] {
            *v = 0.0;
        }
        let traj = synthetic(t, x.clone(), x);
        let est = lyapunov_exponent(&traj, Species::Infected, 0.2).unwrap();
        assert_eq!(est.n_points, 4);
        assert!((est.slope + 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_before_burn_in_is_empty_window() {
        let t = grid(11, 1.0);
        let mut x = vec![1.0; 11];
        for v in &mut x[1..] {
            *v = 0.0;
        }
        let traj = synthetic(t, x.clone(), x);
        assert!(matches!(
            lyapunov_exponent(&traj, Species::Infected, 0.2),
            Err(AnalysisError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn time_average_of_constant() {
        let t = grid(50, 0.5);
        let traj = synthetic(t, vec![3.0; 50], vec![2.0; 50]);
        for p in [0.5, 1.0, 2.0, 3.7] {
            let avg = time_average(&traj, Species::Infected, p, 0.1).unwrap();
            assert!((avg - 3f64.powf(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn time_average_is_trapezoidal() {
        // linear path x = t on [0, 10]: average over [0, 10] is 5 exactly
        let t = grid(11, 1.0);
        let traj = synthetic(t.clone(), t.clone(), t);
        assert!((time_average(&traj, Species::Infected, 1.0, 0.0).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn min_statistic_examples() {
        let traj = synthetic(grid(5, 1.0), vec![3.0; 5], vec![7.0; 5]);
        assert_eq!(
            min_statistic(std::slice::from_ref(&traj), 2.0).unwrap(),
            3.0
        );
        let origin = synthetic(grid(5, 1.0), vec![0.0; 5], vec![0.0; 5]);
        assert_eq!(min_statistic(&[origin.clone(), origin], 4.0).unwrap(), 0.0);
        assert!(min_statistic(&[], 1.0).is_err());
    }

    #[test]
    fn thinning_respects_spacing() {
        let t = grid(1001, 0.1);
        let x: Vec<f64> = (0..1001).map(|k| k as f64).collect();
        let traj = synthetic(t, x.clone(), x);
        let s = thinned_samples(&traj, Species::Infected, 0.1, 10.0).unwrap();
        assert_eq!(
            s,
            vec![100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0, 900.0, 1000.0]
        );
        assert!(thinned_samples(&traj, Species::Infected, 0.1, 0.01).is_err());
    }
}
