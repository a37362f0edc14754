#ifndef TRAPDYN_H
#define TRAPDYN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TrapdynClassification {
  TRAPDYN_CLASSIFICATION_SADDLE = 0,
  TRAPDYN_CLASSIFICATION_STABLE_NODE = 1,
  TRAPDYN_CLASSIFICATION_UNSTABLE_NODE = 2,
  TRAPDYN_CLASSIFICATION_STABLE_SPIRAL = 3,
  TRAPDYN_CLASSIFICATION_UNSTABLE_SPIRAL = 4,
  TRAPDYN_CLASSIFICATION_DEGENERATE = 5,
} TrapdynClassification;

typedef enum TrapdynStatus {
  TRAPDYN_STATUS_OK = 0,
  TRAPDYN_STATUS_NULL_POINTER = 1,
  TRAPDYN_STATUS_INVALID_ARGUMENT = 2,
  TRAPDYN_STATUS_CONFIG = 3,
  TRAPDYN_STATUS_INVALID_PARAMS = 4,
  TRAPDYN_STATUS_DOMAIN = 5,
  TRAPDYN_STATUS_NUMERICAL = 6,
  TRAPDYN_STATUS_BUFFER_TOO_SMALL = 7,
  TRAPDYN_STATUS_PANIC = 8,
} TrapdynStatus;

/**
 * Opaque model handle.
 */
typedef struct TrapdynModel TrapdynModel;

typedef struct TrapdynSteadyState {
  double a;
  double pi;
  double nominal_rate;
  double residual;
} TrapdynSteadyState;

/**
 * Roots are `re1 + i·im1` and `re2 + i·im2`. Real roots have zero
 * imaginary parts and `re1 <= re2`.
 */
typedef struct TrapdynEigen {
  double trace;
  double determinant;
  double discriminant;
  double re1;
  double im1;
  double re2;
  double im2;
  enum TrapdynClassification classification;
} TrapdynEigen;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message from the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next `trapdyn_*` call on the same
 * thread.
 */
const char *trapdyn_last_error(void);

void trapdyn_clear_error(void);

/**
 * Static, NUL-terminated version string.
 */
const char *trapdyn_version(void);

/**
 * Builds a model from a JSON run configuration.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TrapdynStatus trapdyn_model_from_json(const char *json, struct TrapdynModel **out);

/**
 * Builds one of the named models: "figure1", "figure2" or "figure3".
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TrapdynStatus trapdyn_model_preset(const char *name, struct TrapdynModel **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `model` must come from a `trapdyn_model_*` constructor and not be
 * freed twice.
 */
void trapdyn_model_free(struct TrapdynModel *model);

/**
 * Serializes the model back to a JSON configuration. Writes at most
 * `cap` bytes including the terminator; `*len` receives the length
 * without it. Returns `BUFFER_TOO_SMALL` if `cap <= *len`.
 *
 * # Safety
 * `buf` must hold `cap` bytes (it may be NULL when `cap` is zero).
 */
enum TrapdynStatus trapdyn_model_to_json(const struct TrapdynModel *model,
                                         char *buf,
                                         size_t cap,
                                         size_t *len);

/**
 * `(ȧ, π̇)` at `(a, pi)`.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum TrapdynStatus trapdyn_vector_field(const struct TrapdynModel *model,
                                        double a,
                                        double pi,
                                        double *a_dot,
                                        double *pi_dot);

/**
 * The low-inflation and target steady states.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum TrapdynStatus trapdyn_steady_states(const struct TrapdynModel *model,
                                         struct TrapdynSteadyState *trap,
                                         struct TrapdynSteadyState *target);

/**
 * Eigen-analysis of the linearization at the trap (`which = 0`) or the
 * target (`which = 1`).
 *
 * # Safety
 * `out` must be valid.
 */
enum TrapdynStatus trapdyn_classify_steady(const struct TrapdynModel *model,
                                           uint32_t which,
                                           struct TrapdynEigen *out);

/**
 * Eigen-analysis of an arbitrary 2x2 matrix, row-major.
 *
 * # Safety
 * `out` must be valid.
 */
enum TrapdynStatus trapdyn_classify_matrix(double j11,
                                           double j12,
                                           double j21,
                                           double j22,
                                           struct TrapdynEigen *out);

/**
 * Trap inflation-feedback coefficient from local anchors, with the
 * remaining calibration at its defaults.
 *
 * # Safety
 * `out` must be valid.
 */
enum TrapdynStatus trapdyn_j22_local(double eps,
                                     double velocity,
                                     double psi_trap,
                                     double psi_prime_trap,
                                     double a_star,
                                     double *out);

/**
 * Integrates forward from `(a0, pi0)` and samples every
 * `sample_interval` years. Up to `cap` samples go into `t`, `a`, `pi`;
 * `*len` receives the full count. Returns `BUFFER_TOO_SMALL` when
 * `cap < *len`, after filling what fits.
 *
 * # Safety
 * `t`, `a` and `pi` must each hold `cap` doubles.
 */
enum TrapdynStatus trapdyn_integrate(const struct TrapdynModel *model,
                                     double a0,
                                     double pi0,
                                     double horizon,
                                     double sample_interval,
                                     double *t,
                                     double *a,
                                     double *pi,
                                     size_t cap,
                                     size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRAPDYN_H */
