//! C ABI over the `wolbachia` crate.
//!
//! Conventions:
//! - every fallible function returns a [`WolStatus`] and writes its result
//!   through an out pointer, which is left untouched on failure;
//! - parameter sets and trajectories are opaque heap handles released with
//!   the matching `_free` function (passing NULL is a no-op);
//! - after a non-OK status, [`wol_last_error_message`] describes the failure
//!   on the calling thread;
//! - undefined real-valued outputs (e.g. a Gamma shape when σ = 0) are NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wolbachia::analysis::ks_test;
use wolbachia::model::{classify, derive, GammaLaw, ModelError, RegimeTag};
use wolbachia::sde::{simulate_boundary, simulate_path, SdeError, SimConfig, Trajectory};
use wolbachia::{ModelParams, Species, State};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WolSpecies {
    Infected = 0,
    Uninfected = 1,
}

impl From<WolSpecies> for Species {
    fn from(s: WolSpecies) -> Self {
        match s {
            WolSpecies::Infected => Species::Infected,
            WolSpecies::Uninfected => Species::Uninfected,
        }
    }
}

impl From<Species> for WolSpecies {
    fn from(s: Species) -> Self {
        match s {
            Species::Infected => WolSpecies::Infected,
            Species::Uninfected => WolSpecies::Uninfected,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WolRegime {
    A1 = 0,
    A2 = 1,
    B1 = 2,
    B2 = 3,
    B3 = 4,
    Indeterminate = 5,
}

impl From<RegimeTag> for WolRegime {
    fn from(tag: RegimeTag) -> Self {
        match tag {
            RegimeTag::BothExtinct => WolRegime::A1,
            RegimeTag::InfectedPersistsUninfectedDies => WolRegime::A2,
            RegimeTag::InfectedPersistsUninfectedDiesHighNoise => WolRegime::B1,
            RegimeTag::InfectedDiesUninfectedPersists => WolRegime::B2,
            RegimeTag::BoundaryMixture => WolRegime::B3,
            RegimeTag::Indeterminate => WolRegime::Indeterminate,
        }
    }
}

/// The eight model rates, in the order b_I, b_U, δ_I, δ_U, d_I, d_U, σ_I, σ_U.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolParamValues {
    pub b_i: f64,
    pub b_u: f64,
    pub delta_i: f64,
    pub delta_u: f64,
    pub d_i: f64,
    pub d_u: f64,
    pub sigma_i: f64,
    pub sigma_u: f64,
}

/// Opaque parameter set.
pub struct WolParams(ModelParams);

/// Opaque recorded trajectory.
pub struct WolTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolDerived {
    pub lambda_i: f64,
    pub lambda_u: f64,
    pub q_i: f64,
    pub beta_i: f64,
    pub q_u: f64,
    pub beta_u: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolClassification {
    pub regime: WolRegime,
    pub lambda_i: f64,
    pub lambda_u: f64,
    /// Stationary law of I, NaN if none is attached.
    pub infected_shape: f64,
    pub infected_rate: f64,
    pub uninfected_shape: f64,
    pub uninfected_rate: f64,
    /// Whether an extinction exponent is attached.
    pub has_extinction_exponent: bool,
    pub extinction_species: WolSpecies,
    pub extinction_rate: f64,
    pub mixture_weights_determined: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolSimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub i0: f64,
    pub u0: f64,
    pub seed: u64,
    pub path_index: u64,
    pub truncation_base: f64,
    pub clip_negative: bool,
    pub record_stride: usize,
}

impl From<&WolSimConfig> for SimConfig {
    fn from(c: &WolSimConfig) -> Self {
        SimConfig {
            dt: c.dt,
            horizon: c.horizon,
            initial: State::new(c.i0, c.u0),
            seed: c.seed,
            path_index: c.path_index,
            truncation_base: c.truncation_base,
            clip_negative: c.clip_negative,
            record_stride: c.record_stride,
            ..SimConfig::default()
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolKsResult {
    pub statistic: f64,
    pub n: usize,
    pub critical: f64,
    pub pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: WolStatus, message: impl Into<String>) -> WolStatus {
    set_error(message);
    status
}

fn model_error(e: ModelError) -> WolStatus {
    fail(WolStatus::InvalidArgument, e.to_string())
}

fn sde_error(e: SdeError) -> WolStatus {
    let status = match e {
        SdeError::NonFinite { .. } => WolStatus::NonFinite,
        _ => WolStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning a panic into `WolStatus::Panic`.
fn guard(f: impl FnOnce() -> WolStatus) -> WolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(WolStatus::Panic, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(WolStatus::NullPointer, concat!(stringify!($p), " is NULL"));
        })+
    };
}

/// Message for the last non-OK status on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wol_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// base rates with the given noise intensities.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wol_params_base_rates(
    sigma_i: f64,
    sigma_u: f64,
    out: *mut WolParamValues,
) -> WolStatus {
    guard(|| {
        non_null!(out);
        let p = ModelParams::base_rates().with_noise(sigma_i, sigma_u);
        unsafe { out.write(to_values(&p)) };
        WolStatus::Ok
    })
}

fn to_values(p: &ModelParams) -> WolParamValues {
    WolParamValues {
        b_i: p.b_i,
        b_u: p.b_u,
        delta_i: p.delta_i,
        delta_u: p.delta_u,
        d_i: p.d_i,
        d_u: p.d_u,
        sigma_i: p.sigma_i,
        sigma_u: p.sigma_u,
    }
}

/// Validates `values` and allocates a parameter handle.
///
/// # Safety
/// `values` must point to a readable `WolParamValues` and `out` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn wol_params_new(
    values: *const WolParamValues,
    out: *mut *mut WolParams,
) -> WolStatus {
    guard(|| {
        non_null!(values, out);
        let v = unsafe { *values };
        let p = ModelParams {
            b_i: v.b_i,
            b_u: v.b_u,
            delta_i: v.delta_i,
            delta_u: v.delta_u,
            d_i: v.d_i,
            d_u: v.d_u,
            sigma_i: v.sigma_i,
            sigma_u: v.sigma_u,
        };
        if let Err(e) = p.validate() {
            return model_error(e);
        }
        unsafe { out.write(Box::into_raw(Box::new(WolParams(p)))) };
        WolStatus::Ok
    })
}

/// # Safety
/// `params` must be NULL or a handle from `wol_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wol_params_free(params: *mut WolParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Growth rates and Gamma parameters.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wol_derive(params: *const WolParams, out: *mut WolDerived) -> WolStatus {
    guard(|| {
        non_null!(params, out);
        let d = derive(unsafe { &(*params).0 });
        let nan = f64::NAN;
        unsafe {
            out.write(WolDerived {
                lambda_i: d.lambda_i,
                lambda_u: d.lambda_u,
                q_i: d.shape(Species::Infected).unwrap_or(nan),
                beta_i: d.rate(Species::Infected).unwrap_or(nan),
                q_u: d.shape(Species::Uninfected).unwrap_or(nan),
                beta_u: d.rate(Species::Uninfected).unwrap_or(nan),
            })
        };
        WolStatus::Ok
    })
}

/// Threshold regime with its attached laws and extinction exponent.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wol_classify(
    params: *const WolParams,
    out: *mut WolClassification,
) -> WolStatus {
    guard(|| {
        non_null!(params, out);
        let regime = match classify(unsafe { &(*params).0 }) {
            Ok(r) => r,
            Err(e) => return model_error(e),
        };
        let law = |l: Option<GammaLaw>| l.map_or((f64::NAN, f64::NAN), |l| (l.shape(), l.rate()));
        let (infected_shape, infected_rate) = law(regime.infected_law);
        let (uninfected_shape, uninfected_rate) = law(regime.uninfected_law);
        let e = regime.extinction_exponent;
        unsafe {
            out.write(WolClassification {
                regime: regime.tag.into(),
                lambda_i: regime.derived.lambda_i,
                lambda_u: regime.derived.lambda_u,
                infected_shape,
                infected_rate,
                uninfected_shape,
                uninfected_rate,
                has_extinction_exponent: e.is_some(),
                extinction_species: e.map_or(WolSpecies::Infected, |e| e.species.into()),
                extinction_rate: e.map_or(f64::NAN, |e| e.rate),
                mixture_weights_determined: regime.mixture_weights_determined,
            })
        };
        WolStatus::Ok
    })
}

/// Default simulation settings: Δ = 1e-4, T = 100, (I0, U0) = (100, 500),
/// seed 0, truncation base 600, clipping on, record stride 100.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wol_sim_config_default(out: *mut WolSimConfig) -> WolStatus {
    guard(|| {
        non_null!(out);
        let c = SimConfig::default();
        unsafe {
            out.write(WolSimConfig {
                dt: c.dt,
                horizon: c.horizon,
                i0: c.initial.infected,
                u0: c.initial.uninfected,
                seed: c.seed,
                path_index: c.path_index,
                truncation_base: c.truncation_base,
                clip_negative: c.clip_negative,
                record_stride: c.record_stride,
            })
        };
        WolStatus::Ok
    })
}

fn finish_simulation(
    result: Result<Trajectory, SdeError>,
    out: *mut *mut WolTrajectory,
) -> WolStatus {
    match result {
        Ok(t) => {
            unsafe { out.write(Box::into_raw(Box::new(WolTrajectory(t)))) };
            WolStatus::Ok
        }
        Err(e) => sde_error(e),
    }
}

/// Simulates one full path.
///
/// # Safety
/// `params` must be a live handle, `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wol_simulate_path(
    params: *const WolParams,
    config: *const WolSimConfig,
    out: *mut *mut WolTrajectory,
) -> WolStatus {
    guard(|| {
        non_null!(params, config, out);
        let config = SimConfig::from(unsafe { &*config });
        finish_simulation(simulate_path(&config, unsafe { &(*params).0 }), out)
    })
}

/// Simulates the one-species boundary process of `species`.
///
/// # Safety
/// As for [`wol_simulate_path`].
#[no_mangle]
pub unsafe extern "C" fn wol_simulate_boundary(
    params: *const WolParams,
    config: *const WolSimConfig,
    species: WolSpecies,
    out: *mut *mut WolTrajectory,
) -> WolStatus {
    guard(|| {
        non_null!(params, config, out);
        let config = SimConfig::from(unsafe { &*config });
        finish_simulation(
            simulate_boundary(&config, unsafe { &(*params).0 }, species.into()),
            out,
        )
    })
}

/// Number of recorded points, or 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wol_trajectory_len(traj: *const WolTrajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        unsafe { (*traj).0.len() }
    }
}

/// Copies the `t`, `I` and `U` columns into caller buffers of `capacity`
/// elements each. Any of the three buffers may be NULL to skip it.
///
/// # Safety
/// `traj` must be a live handle; non-null buffers must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn wol_trajectory_copy(
    traj: *const WolTrajectory,
    times: *mut f64,
    infected: *mut f64,
    uninfected: *mut f64,
    capacity: usize,
) -> WolStatus {
    guard(|| {
        non_null!(traj);
        let t = unsafe { &(*traj).0 };
        if capacity < t.len() {
            return fail(
                WolStatus::BufferTooSmall,
                format!("capacity {capacity} < trajectory length {}", t.len()),
            );
        }
        for (dst, src) in [
            (times, t.times()),
            (infected, t.infected()),
            (uninfected, t.uninfected()),
        ] {
            if !dst.is_null() {
                unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len()) };
            }
        }
        WolStatus::Ok
    })
}

/// # Safety
/// `traj` must be NULL or a live handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wol_trajectory_free(traj: *mut WolTrajectory) {
    if !traj.is_null() {
        drop(unsafe { Box::from_raw(traj) });
    }
}

/// `P(X <= x)` for `X ~ Ga(shape, rate)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wol_gamma_cdf(shape: f64, rate: f64, x: f64, out: *mut f64) -> WolStatus {
    guard(|| {
        non_null!(out);
        match GammaLaw::new(shape, rate) {
            Ok(law) => {
                unsafe { out.write(law.cdf(x)) };
                WolStatus::Ok
            }
            Err(e) => model_error(e),
        }
    })
}

/// One-sample K-S test at level 0.05 against `Ga(shape, rate)`.
///
/// # Safety
/// `samples` must hold `n` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wol_ks_test(
    samples: *const f64,
    n: usize,
    shape: f64,
    rate: f64,
    out: *mut WolKsResult,
) -> WolStatus {
    guard(|| {
        non_null!(samples, out);
        let law = match GammaLaw::new(shape, rate) {
            Ok(l) => l,
            Err(e) => return model_error(e),
        };
        let data = unsafe { std::slice::from_raw_parts(samples, n) };
        match ks_test(data, &law) {
            Ok(r) => {
                unsafe {
                    out.write(WolKsResult {
                        statistic: r.statistic,
                        n: r.n,
                        critical: r.critical,
                        pass: r.pass,
                    })
                };
                WolStatus::Ok
            }
            Err(e) => fail(WolStatus::InvalidArgument, e.to_string()),
        }
    })
}
