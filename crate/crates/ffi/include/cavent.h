#ifndef CAVENT_H
#define CAVENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every fallible entry point.
 */
typedef enum CaventStatus {
  CAVENT_STATUS_OK = 0,
  CAVENT_STATUS_NULL_POINTER = 1,
  CAVENT_STATUS_INVALID_ARGUMENT = 2,
  CAVENT_STATUS_NUMERICAL = 3,
  CAVENT_STATUS_IO = 4,
  CAVENT_STATUS_PANIC = 5,
} CaventStatus;

/**
 * Opaque parameter set.
 */
typedef struct CaventParams CaventParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parameters of the dispersive closed system with `g2/g1 = ratio`.
 */
struct CaventParams *cavent_params_new_dispersive(double ratio);

/**
 * Parameters of the resonant, driven and lossy system.
 */
struct CaventParams *cavent_params_new_open(double ratio, double drive);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from `cavent_params_new_*` and not be freed twice.
 */
void cavent_params_free(struct CaventParams *p);

/**
 * Sets one field: `g1`, `g2`, `g2_over_g1`, `omega`, `eps` (both qubits),
 * `eps1`, `eps2`, `kappa`, `gamma`, `d`, `drive_omega` or `n_max`.
 *
 * # Safety
 * `p` must be a live handle and `key` a NUL-terminated string.
 */
enum CaventStatus cavent_params_set(struct CaventParams *p, const char *key, double value);

/**
 * Analytic single-excitation eigensystem.
 *
 * `energies` receives `E1, E2, E3`; `vectors` receives the nine real
 * amplitudes `(alpha, beta, gamma)` of each eigenvector in the same order.
 *
 * # Safety
 * `energies` must hold 3 doubles and `vectors` 9.
 */
enum CaventStatus cavent_eigensystem(const struct CaventParams *p,
                                     double *energies,
                                     double *vectors);

/**
 * Concurrence from the exact closed dynamics, starting with qubit 2 excited.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum CaventStatus cavent_closed_concurrence(const struct CaventParams *p, double t, double *out);

/**
 * Concurrence from the effective dispersive evolution.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum CaventStatus cavent_effective_concurrence(const struct CaventParams *p, double t, double *out);

/**
 * Analytic MES lapse and period. The lapse is NaN below the threshold ratio.
 *
 * # Safety
 * `p` must be a live handle; both outputs writable.
 */
enum CaventStatus cavent_mes_lapse(const struct CaventParams *p, double *lapse, double *period);

/**
 * Smallest `g2/g1` for which maximally entangled states are reached.
 */
double cavent_mes_threshold_ratio(void);

/**
 * Steady-state qubit concurrence of the driven, lossy system.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum CaventStatus cavent_steady_state_concurrence(const struct CaventParams *p, double *out);

/**
 * Wootters concurrence of a two-qubit density matrix.
 *
 * `rho` holds 32 doubles: the 4x4 matrix in row-major order, each entry as
 * `re, im`, in the basis `|00>, |01>, |10>, |11>`.
 *
 * # Safety
 * `rho` must point to 32 readable doubles and `out` be writable.
 */
enum CaventStatus cavent_concurrence(const double *rho, double *out);

/**
 * Runs a named scenario and writes its CSV files.
 *
 * `out_dir` may be null to use the default location. `overrides` is an
 * array of `n_overrides` strings of the form `key=value`. `threads = 0`
 * uses all cores.
 *
 * # Safety
 * All non-null pointers must be valid NUL-terminated strings.
 */
enum CaventStatus cavent_run_scenario(const char *name,
                                      const char *out_dir,
                                      const char *const *overrides,
                                      size_t n_overrides,
                                      size_t threads);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *cavent_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cavent_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVENT_H */
