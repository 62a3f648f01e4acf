#ifndef WOLBACHIA_H
#define WOLBACHIA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WolRegime {
  WOL_REGIME_A1 = 0,
  WOL_REGIME_A2 = 1,
  WOL_REGIME_B1 = 2,
  WOL_REGIME_B2 = 3,
  WOL_REGIME_B3 = 4,
  WOL_REGIME_INDETERMINATE = 5,
} WolRegime;

typedef enum WolSpecies {
  WOL_SPECIES_INFECTED = 0,
  WOL_SPECIES_UNINFECTED = 1,
} WolSpecies;

typedef enum WolStatus {
  WOL_STATUS_OK = 0,
  WOL_STATUS_NULL_POINTER = 1,
  WOL_STATUS_INVALID_ARGUMENT = 2,
  WOL_STATUS_NON_FINITE = 3,
  WOL_STATUS_BUFFER_TOO_SMALL = 4,
  WOL_STATUS_PANIC = 5,
} WolStatus;

/**
 * Opaque parameter set.
 */
typedef struct WolParams WolParams;

/**
 * Opaque recorded trajectory.
 */
typedef struct WolTrajectory WolTrajectory;

/**
 * The eight model rates, in the order b_I, b_U, δ_I, δ_U, d_I, d_U, σ_I, σ_U.
 */
typedef struct WolParamValues {
  double b_i;
  double b_u;
  double delta_i;
  double delta_u;
  double d_i;
  double d_u;
  double sigma_i;
  double sigma_u;
} WolParamValues;

typedef struct WolDerived {
  double lambda_i;
  double lambda_u;
  double q_i;
  double beta_i;
  double q_u;
  double beta_u;
} WolDerived;

typedef struct WolClassification {
  enum WolRegime regime;
  double lambda_i;
  double lambda_u;
  /**
   * Stationary law of I, NaN if none is attached.
   */
  double infected_shape;
  double infected_rate;
  double uninfected_shape;
  double uninfected_rate;
  /**
   * Whether an extinction exponent is attached.
   */
  bool has_extinction_exponent;
  enum WolSpecies extinction_species;
  double extinction_rate;
  bool mixture_weights_determined;
} WolClassification;

typedef struct WolSimConfig {
  double dt;
  double horizon;
  double i0;
  double u0;
  uint64_t seed;
  uint64_t path_index;
  double truncation_base;
  bool clip_negative;
  size_t record_stride;
} WolSimConfig;

typedef struct WolKsResult {
  double statistic;
  size_t n;
  double critical;
  bool pass;
} WolKsResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last non-OK status on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *wol_last_error_message(void);

/**
 * base rates with the given noise intensities.
 *
 * # Safety
 * `out` must be writable.
 */
enum WolStatus wol_params_base_rates(double sigma_i, double sigma_u, struct WolParamValues *out);

/**
 * Validates `values` and allocates a parameter handle.
 *
 * # Safety
 * `values` must point to a readable `WolParamValues` and `out` to a
 * writable handle slot.
 */
enum WolStatus wol_params_new(const struct WolParamValues *values, struct WolParams **out);

/**
 * # Safety
 * `params` must be NULL or a handle from `wol_params_new` not yet freed.
 */
void wol_params_free(struct WolParams *params);

/**
 * Growth rates and Gamma parameters.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum WolStatus wol_derive(const struct WolParams *params, struct WolDerived *out);

/**
 * Threshold regime with its attached laws and extinction exponent.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum WolStatus wol_classify(const struct WolParams *params, struct WolClassification *out);

/**
 * Default simulation settings: Δ = 1e-4, T = 100, (I0, U0) = (100, 500),
 * seed 0, truncation base 600, clipping on, record stride 100.
 *
 * # Safety
 * `out` must be writable.
 */
enum WolStatus wol_sim_config_default(struct WolSimConfig *out);

/**
 * Simulates one full path.
 *
 * # Safety
 * `params` must be a live handle, `config` readable and `out` writable.
 */
enum WolStatus wol_simulate_path(const struct WolParams *params,
                                 const struct WolSimConfig *config,
                                 struct WolTrajectory **out);

/**
 * Simulates the one-species boundary process of `species`.
 *
 * # Safety
 * As for [`wol_simulate_path`].
 */
enum WolStatus wol_simulate_boundary(const struct WolParams *params,
                                     const struct WolSimConfig *config,
                                     enum WolSpecies species,
                                     struct WolTrajectory **out);

/**
 * Number of recorded points, or 0 for NULL.
 *
 * # Safety
 * `traj` must be NULL or a live handle.
 */
size_t wol_trajectory_len(const struct WolTrajectory *traj);

/**
 * Copies the `t`, `I` and `U` columns into caller buffers of `capacity`
 * elements each. Any of the three buffers may be NULL to skip it.
 *
 * # Safety
 * `traj` must be a live handle; non-null buffers must hold `capacity` doubles.
 */
enum WolStatus wol_trajectory_copy(const struct WolTrajectory *traj,
                                   double *times,
                                   double *infected,
                                   double *uninfected,
                                   size_t capacity);

/**
 * # Safety
 * `traj` must be NULL or a live handle not yet freed.
 */
void wol_trajectory_free(struct WolTrajectory *traj);

/**
 * `P(X <= x)` for `X ~ Ga(shape, rate)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum WolStatus wol_gamma_cdf(double shape, double rate, double x, double *out);

/**
 * One-sample K-S test at level 0.05 against `Ga(shape, rate)`.
 *
 * # Safety
 * `samples` must hold `n` readable doubles and `out` be writable.
 */
enum WolStatus wol_ks_test(const double *samples,
                           size_t n,
                           double shape,
                           double rate,
                           struct WolKsResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WOLBACHIA_H */
