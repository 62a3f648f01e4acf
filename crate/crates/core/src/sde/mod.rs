//! Truncated Euler–Maruyama integration of the stochastic model.
//!
//! One step from `(I_k, U_k)` with normals `(ζ_k, ξ_k)`:
//!
//! ```text
//! Ĩ = I_k + I_k [b_I − δ_I − d_I (I_k + U_k)] Δ + σ_I I_k √Δ ζ_k
//! Ũ = U_k + U_k [b_U U_k/(I_k + U_k) − δ_U − d_U (I_k + U_k)] Δ + σ_U U_k √Δ ξ_k
//! (I_{k+1}, U_{k+1}) = min(1, R Δ^(−2/5) / ‖(Ĩ, Ũ)‖₂) · (Ĩ, Ũ)
//! ```
//!
//! with `R = truncation_base + I_0 + U_0`, followed by an optional floor at
//! zero. Boundary processes are integrated with the same step applied to a
//! state whose other component is zero, so a boundary path and the matching
//! component of a full path started on that boundary agree bit for bit.

mod noise;
mod trajectory;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{uninfected_fraction, ModelError, ModelParams, Species, State};

pub use noise::{NoiseStream, SeedLineage};
pub use trajectory::{Trajectory, TrajectoryKind};

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_TRUNCATION_BASE: f64 = 600.0;
pub const DEFAULT_TRUNCATION_EXPONENT: f64 = 0.4;
pub const DEFAULT_RECORD_STRIDE: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdeError {
    #[error("invalid simulation config {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(
        "non-finite state at step {step}{}; the step size is likely too large",
        lineage.map(|l| format!(" ({l})")).unwrap_or_default()
    )]
    NonFinite {
        step: u64,
        lineage: Option<SeedLineage>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub initial: State,
    pub seed: u64,
    #[serde(default)]
    pub path_index: u64,
    pub truncation_base: f64,
    /// Power `a` in the truncation radius `R·Δ^(−a)`.
    #[serde(default = "default_truncation_exponent")]
    pub truncation_exponent: f64,
    pub clip_negative: bool,
    pub record_stride: usize,
}

fn default_truncation_exponent() -> f64 {
    DEFAULT_TRUNCATION_EXPONENT
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: DEFAULT_DT,
            horizon: 100.0,
            initial: State::new(100.0, 500.0),
            seed: 0,
            path_index: 0,
            truncation_base: DEFAULT_TRUNCATION_BASE,
            truncation_exponent: DEFAULT_TRUNCATION_EXPONENT,
            clip_negative: true,
            record_stride: DEFAULT_RECORD_STRIDE,
        }
    }
}

impl SimConfig {
    pub fn new(initial: State, horizon: f64, seed: u64) -> Self {
        SimConfig {
            initial,
            horizon,
            seed,
            ..SimConfig::default()
        }
    }

    pub fn with_path_index(self, path_index: u64) -> Self {
        SimConfig { path_index, ..self }
    }

    pub fn lineage(&self) -> SeedLineage {
        SeedLineage::new(self.seed, self.path_index)
    }

    pub fn validate(&self) -> Result<(), SdeError> {
        let invalid = |field, reason: String| Err(SdeError::InvalidConfig { field, reason });
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return invalid("dt", format!("must be finite and > 0, got {}", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return invalid(
                "horizon",
                format!("must be finite and >= dt, got {}", self.horizon),
            );
        }
        if !self.initial.is_valid() {
            let field = if self.initial.infected.is_finite() && self.initial.infected >= 0.0 {
                "U0"
            } else {
                "I0"
            };
            return invalid(field, "initial populations must be finite and >= 0".into());
        }
        if !(self.truncation_base.is_finite() && self.truncation_base > 0.0) {
            return invalid(
                "truncation_base",
                format!("must be finite and > 0, got {}", self.truncation_base),
            );
        }
        if !(self.truncation_exponent.is_finite() && self.truncation_exponent >= 0.0) {
            return invalid(
                "truncation_exponent",
                format!("must be finite and >= 0, got {}", self.truncation_exponent),
            );
        }
        if self.record_stride == 0 {
            return invalid("record_stride", "must be >= 1".into());
        }
        Ok(())
    }

    /// ⌈T/Δ⌉, treating a ratio within 1e-9 of an integer as that integer.
    pub fn n_steps(&self) -> u64 {
        let ratio = self.horizon / self.dt;
        let rounded = ratio.round();
        if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
            rounded as u64
        } else {
            ratio.ceil() as u64
        }
    }

    /// `R = truncation_base + I_0 + U_0`.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_base + self.initial.infected + self.initial.uninfected
    }

    /// Time between recorded points.
    pub fn record_dt(&self) -> f64 {
        self.dt * self.record_stride as f64
    }
}

/// Precomputed constants of the truncated scheme for one `(params, Δ, R)`.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    growth_i: f64,
    b_u: f64,
    delta_u: f64,
    d_i: f64,
    d_u: f64,
    sigma_i: f64,
    sigma_u: f64,
    dt: f64,
    sqrt_dt: f64,
    radius: f64,
    radius_sq: f64,
    clip_negative: bool,
}

impl Stepper {
    fn new(params: &ModelParams, dt: f64, radius: f64, clip_negative: bool) -> Self {
        Stepper {
            growth_i: params.b_i - params.delta_i,
            b_u: params.b_u,
            delta_u: params.delta_u,
            d_i: params.d_i,
            d_u: params.d_u,
            sigma_i: params.sigma_i,
            sigma_u: params.sigma_u,
            dt,
            sqrt_dt: dt.sqrt(),
            radius,
            radius_sq: radius * radius,
            clip_negative,
        }
    }

    fn for_config(params: &ModelParams, config: &SimConfig) -> Self {
        let radius = config.truncation_bound() * config.dt.powf(-config.truncation_exponent);
        Stepper::new(params, config.dt, radius, config.clip_negative)
    }

    /// `None` when the explicit update is not finite.
    #[inline(always)]
    fn step(&self, state: State, (zeta, xi): (f64, f64)) -> Option<State> {
        let State {
            infected: i,
            uninfected: u,
        } = state;
        let total = i + u;
        let ratio = uninfected_fraction(i, u);
        let i_next = i
            + i * (self.growth_i - self.d_i * total) * self.dt
            + self.sigma_i * i * self.sqrt_dt * zeta;
        let u_next = u
            + u * (self.b_u * ratio - self.delta_u - self.d_u * total) * self.dt
            + self.sigma_u * u * self.sqrt_dt * xi;
        if !(i_next.is_finite() && u_next.is_finite()) {
            return None;
        }

        let norm_sq = i_next * i_next + u_next * u_next;
        let (mut i_next, mut u_next) = if norm_sq > self.radius_sq {
            let norm = if norm_sq.is_finite() {
                norm_sq.sqrt()
            } else {
                i_next.hypot(u_next)
            };
            let factor = self.radius / norm;
            (factor * i_next, factor * u_next)
        } else {
            (i_next, u_next)
        };
        if self.clip_negative {
            if i_next < 0.0 {
                i_next = 0.0;
            }
            if u_next < 0.0 {
                u_next = 0.0;
            }
        }
        Some(State::new(i_next, u_next))
    }
}

/// One truncated Euler–Maruyama step with an explicit truncation bound `R`
/// (the rescaling radius is `R·Δ^(−2/5)`).
///
/// A component entering at exactly 0 leaves at exactly 0.
pub fn truncated_em_step(
    state: State,
    params: &ModelParams,
    dt: f64,
    truncation_bound: f64,
    noise: (f64, f64),
    clip_negative: bool,
) -> Result<State, SdeError> {
    let radius = truncation_bound * dt.powf(-DEFAULT_TRUNCATION_EXPONENT);
    Stepper::new(params, dt, radius, clip_negative)
        .step(state, noise)
        .ok_or(SdeError::NonFinite {
            step: 1,
            lineage: None,
        })
}

struct Recorder {
    times: Vec<f64>,
    infected: Vec<f64>,
    uninfected: Vec<f64>,
}

impl Recorder {
    fn with_capacity(n: usize) -> Self {
        Recorder {
            times: Vec::with_capacity(n),
            infected: Vec::with_capacity(n),
            uninfected: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, state: State) {
        self.times.push(t);
        self.infected.push(state.infected);
        self.uninfected.push(state.uninfected);
    }
}

/// Integrates every start state with the same noise sequence.
fn integrate(
    config: &SimConfig,
    params: &ModelParams,
    starts: &[(TrajectoryKind, State)],
) -> Result<Vec<Trajectory>, SdeError> {
    config.validate()?;
    params.validate()?;
    let stepper = Stepper::for_config(params, config);
    let n_steps = config.n_steps();
    let stride = config.record_stride as u64;
    let n_records = (n_steps / stride + 1) as usize;
    let mut noise = NoiseStream::new(config.lineage());

    let mut states: Vec<State> = starts.iter().map(|&(_, s)| s).collect();
    let mut recorders: Vec<Recorder> = starts
        .iter()
        .map(|_| Recorder::with_capacity(n_records))
        .collect();
    for (rec, &state) in recorders.iter_mut().zip(&states) {
        rec.push(0.0, state);
    }

    for k in 1..=n_steps {
        let pair = noise.gaussian_pair();
        for state in states.iter_mut() {
            *state = stepper.step(*state, pair).ok_or(SdeError::NonFinite {
                step: k,
                lineage: Some(config.lineage()),
            })?;
        }
        if k % stride == 0 {
            let t = k as f64 * config.dt;
            for (rec, &state) in recorders.iter_mut().zip(&states) {
                rec.push(t, state);
            }
        }
    }

    Ok(starts
        .iter()
        .zip(recorders)
        .zip(states)
        .map(|((&(kind, _), rec), final_state)| Trajectory {
            kind,
            lineage: config.lineage(),
            config: *config,
            params: *params,
            times: rec.times,
            infected: rec.infected,
            uninfected: rec.uninfected,
            final_state,
            steps: n_steps,
        })
        .collect())
}

fn boundary_start(config: &SimConfig, species: Species) -> (TrajectoryKind, State) {
    match species {
        Species::Infected => (
            TrajectoryKind::BoundaryI,
            State::new(config.initial.infected, 0.0),
        ),
        Species::Uninfected => (
            TrajectoryKind::BoundaryU,
            State::new(0.0, config.initial.uninfected),
        ),
    }
}

/// Full two-species path over ⌈T/Δ⌉ steps.
pub fn simulate_path(config: &SimConfig, params: &ModelParams) -> Result<Trajectory, SdeError> {
    let mut paths = integrate(config, params, &[(TrajectoryKind::Full, config.initial)])?;
    Ok(paths.remove(0))
}

/// One-species boundary process started from the matching component of
/// `config.initial`. The truncation bound still uses both initial values.
pub fn simulate_boundary(
    config: &SimConfig,
    params: &ModelParams,
    species: Species,
) -> Result<Trajectory, SdeError> {
    let mut paths = integrate(config, params, &[boundary_start(config, species)])?;
    Ok(paths.remove(0))
}

#[derive(Debug, Clone)]
pub struct CoupledPaths {
    pub full: Trajectory,
    pub boundary_i: Trajectory,
    pub boundary_u: Trajectory,
}

/// Full path and both boundary paths driven by the same `(ζ_k, ξ_k)`.
pub fn simulate_coupled(
    config: &SimConfig,
    params: &ModelParams,
) -> Result<CoupledPaths, SdeError> {
    let starts = [
        (TrajectoryKind::Full, config.initial),
        boundary_start(config, Species::Infected),
        boundary_start(config, Species::Uninfected),
    ];
    let mut paths = integrate(config, params, &starts)?.into_iter();
    Ok(CoupledPaths {
        full: paths.next().unwrap(),
        boundary_i: paths.next().unwrap(),
        boundary_u: paths.next().unwrap(),
    })
}

/// Runs `n_paths` full paths with path indices `first_index..first_index + n_paths`
/// on `parallelism` worker threads. The output is ordered by path index and
/// does not depend on `parallelism`.
pub fn simulate_ensemble(
    config: &SimConfig,
    params: &ModelParams,
    n_paths: usize,
    first_index: u64,
    parallelism: usize,
) -> Result<Vec<Trajectory>, SdeError> {
    run_parallel(parallelism, n_paths, |i| {
        simulate_path(&config.with_path_index(first_index + i as u64), params)
    })
}

/// Evaluates `job(0..n)` on a dedicated pool of `parallelism` threads and
/// returns results in index order.
pub(crate) fn run_parallel<T, E, F>(parallelism: usize, n: usize, job: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    if parallelism <= 1 || n <= 1 {
        return (0..n).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| (0..n).into_par_iter().map(job).collect())
}
