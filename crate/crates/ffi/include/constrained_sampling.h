/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CONSTRAINED_SAMPLING_H
#define CONSTRAINED_SAMPLING_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_INVALID_BODY = 3,
  CS_STATUS_DIMENSION_MISMATCH = 4,
  CS_STATUS_NON_CONVERGENCE = 5,
  CS_STATUS_NOT_SPD = 6,
  CS_STATUS_NON_FINITE = 7,
  CS_STATUS_SIZE_MISMATCH = 8,
  CS_STATUS_DEGENERATE = 9,
  CS_STATUS_UNSUPPORTED = 10,
  CS_STATUS_PANIC = 11,
} CsStatus;

typedef enum CsPenaltyKind {
  CS_PENALTY_KIND_EUCLIDEAN = 0,
  CS_PENALTY_KIND_BREGMAN = 1,
  CS_PENALTY_KIND_GAUGE = 2,
} CsPenaltyKind;

typedef enum CsAlgorithm {
  CS_ALGORITHM_CLMC = 0,
  CS_ALGORITHM_CKLMC = 1,
  CS_ALGORITHM_CRLMC = 2,
  CS_ALGORITHM_CRKLMC = 3,
} CsAlgorithm;

typedef enum CsMetric {
  CS_METRIC_W1 = 0,
  CS_METRIC_W2 = 1,
} CsMetric;

/**
 * Opaque convex body.
 */
typedef struct CsBody CsBody;

/**
 * Opaque surrogate potential.
 */
typedef struct CsSurrogate CsSurrogate;

/**
 * Output of [`cs_select_parameters`]; `gamma` is NaN for overdamped schemes.
 */
typedef struct CsSchedulePlan {
  double lambda;
  double h;
  uint64_t n;
  double gamma;
} CsSchedulePlan;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t cs_last_error_message(char *buf, size_t len);

/**
 * Ball with the given center (length `dim`) and radius.
 *
 * # Safety
 * `center` must hold `dim` doubles; `out` must be writable.
 */
enum CsStatus cs_body_ball(size_t dim, const double *center, double radius, struct CsBody **out);

/**
 * Axis-aligned box.
 *
 * # Safety
 * `lower` and `upper` must hold `dim` doubles; `out` must be writable.
 */
enum CsStatus cs_body_box(size_t dim,
                          const double *lower,
                          const double *upper,
                          struct CsBody **out);

/**
 * Polytope `{x : a_iᵀx <= b_i}`; `normals` is row-major `count × dim`.
 *
 * # Safety
 * `normals` must hold `count*dim` doubles and `offsets` `count`.
 */
enum CsStatus cs_body_polytope(size_t dim,
                               size_t count,
                               const double *normals,
                               const double *offsets,
                               struct CsBody **out);

/**
 * # Safety
 * `body` must come from a `cs_body_*` constructor and not be used afterwards.
 */
void cs_body_free(struct CsBody *body);

/**
 * # Safety
 * `body` must be a live handle; `out` writable.
 */
enum CsStatus cs_body_dim(const struct CsBody *body, size_t *out);

/**
 * # Safety
 * `x` must hold `dim(body)` doubles.
 */
enum CsStatus cs_body_contains(const struct CsBody *body, const double *x, bool *out);

/**
 * Euclidean projection of `x` onto the body, written to `out` (`dim` doubles).
 *
 * # Safety
 * `x` and `out` must hold `dim(body)` doubles.
 */
enum CsStatus cs_body_project(const struct CsBody *body, const double *x, double *out);

/**
 * Gauge value `max(1, inf{t : x ∈ tK})`.
 *
 * # Safety
 * `x` must hold `dim(body)` doubles.
 */
enum CsStatus cs_body_gauge(const struct CsBody *body, const double *x, double *out);

/**
 * Surrogate `f + d_K/(2λ²)` with `f(x) = ½ (x-μ)ᵀA(x-μ)`. `center` and
 * `precision` may be null for the standard Gaussian; `q` is read only for
 * the Bregman kind (row-major `dim × dim`). The body is copied.
 *
 * # Safety
 * Non-null arrays must have the sizes above; `out` writable.
 */
enum CsStatus cs_surrogate_new(const struct CsBody *body,
                               enum CsPenaltyKind kind,
                               const double *q,
                               double lambda,
                               const double *center,
                               const double *precision,
                               struct CsSurrogate **out);

/**
 * # Safety
 * `sp` must come from [`cs_surrogate_new`] and not be used afterwards.
 */
void cs_surrogate_free(struct CsSurrogate *sp);

/**
 * # Safety
 * `x` must hold `dim` doubles.
 */
enum CsStatus cs_surrogate_value(const struct CsSurrogate *sp, const double *x, double *out);

/**
 * # Safety
 * `x` and `out` must hold `dim` doubles.
 */
enum CsStatus cs_surrogate_gradient(const struct CsSurrogate *sp, const double *x, double *out);

/**
 * # Safety
 * `out` writable.
 */
enum CsStatus cs_surrogate_smoothness_bound(const struct CsSurrogate *sp, double *out);

/**
 * Runs one chain of `n` steps from `init` and writes the final position.
 * `gamma` is ignored by overdamped schemes; `inside_scale = 1` disables
 * the inside-body step reduction.
 *
 * # Safety
 * `init` and `out_final` must hold `dim` doubles; `out_grad_evals` may be null.
 */
enum CsStatus cs_run_chain(const struct CsSurrogate *sp,
                           enum CsAlgorithm algo,
                           const double *init,
                           size_t n,
                           double h,
                           double gamma,
                           double inside_scale,
                           uint64_t seed,
                           uint64_t chain_id,
                           double *out_final,
                           uint64_t *out_grad_evals);

/**
 * # Safety
 * `out` writable.
 */
enum CsStatus cs_select_parameters(enum CsAlgorithm algo,
                                   enum CsMetric metric,
                                   double epsilon,
                                   size_t p,
                                   double m,
                                   double big_m,
                                   double m0,
                                   double user_constant,
                                   struct CsSchedulePlan *out);

/**
 * Exact `W_q` between two uniform clouds of `n` points each (row-major
 * `n × dim`).
 *
 * # Safety
 * `a` and `b` must hold `n*dim` doubles.
 */
enum CsStatus cs_wasserstein(double q,
                             size_t n,
                             size_t dim,
                             const double *a,
                             const double *b,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONSTRAINED_SAMPLING_H */
