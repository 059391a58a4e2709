#ifndef BIVAR_H
#define BIVAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BivarStrategy {
  BIVAR_STRATEGY_DYADIC = 0,
  BIVAR_STRATEGY_GREEDY,
  BIVAR_STRATEGY_ADAPTIVE,
} BivarStrategy;

typedef enum BivarError {
  BIVAR_ERROR_OK = 0,
  BIVAR_ERROR_NULL_POINTER,
  BIVAR_ERROR_INVALID_UTF8,
  BIVAR_ERROR_DIMENSION,
  BIVAR_ERROR_MEMBERSHIP,
  BIVAR_ERROR_DOMAIN,
  BIVAR_ERROR_SYNTAX,
  BIVAR_ERROR_ARITY,
  BIVAR_ERROR_EVALUATION,
  BIVAR_ERROR_COMPOSITION,
  BIVAR_ERROR_NOT_BOUNDED,
  BIVAR_ERROR_UNCONVERGED,
  BIVAR_ERROR_UNKNOWN,
  BIVAR_ERROR_CONFIG,
  BIVAR_ERROR_PANIC,
} BivarError;

typedef enum BivarVariationStatus {
  BIVAR_VARIATION_STATUS_CONVERGED = 0,
  BIVAR_VARIATION_STATUS_DIVERGING,
  BIVAR_VARIATION_STATUS_BUDGET_EXHAUSTED,
} BivarVariationStatus;

// Result of a variation estimate.
typedef struct BivarEstimate BivarEstimate;

// A function of one real variable on a closed interval.
typedef struct BivarFunction BivarFunction;

// A two-norm pairing.
typedef struct BivarPairing BivarPairing;

// Refinement settings; start from [`bivar_refine_config_default`].
typedef struct BivarRefineConfig {
  double gain_tol;
  size_t max_points;
  double divergence_cap;
  size_t divergence_levels;
  enum BivarStrategy strategy;
  uint32_t probe_depth;
} BivarRefineConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *bivar_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void bivar_string_free(char *s);

struct BivarRefineConfig bivar_refine_config_default(void);

// Looks up a pairing by name: `euclidean-modulus`, `modulus-product`,
// `broken-g3` or `zero`.
//
// # Safety
// `name` must be a nul-terminated string; `out` must be writable.
enum BivarError bivar_pairing_new(const char *name, struct BivarPairing **out);

// # Safety
// `p` must come from [`bivar_pairing_new`] and not have been freed.
void bivar_pairing_free(struct BivarPairing *p);

// Dimensions of the two slots.
//
// # Safety
// `p` must be a live handle; `dim_a` and `dim_b` must be writable.
enum BivarError bivar_pairing_dims(const struct BivarPairing *p, size_t *dim_a, size_t *dim_b);

// `||a, b||`.
//
// # Safety
// `a` and `b` must point to `2 * dim_a` and `2 * dim_b` doubles; `out`
// must be writable.
enum BivarError bivar_pairing_eval(const struct BivarPairing *p,
                                   const double *a,
                                   size_t dim_a,
                                   const double *b,
                                   size_t dim_b,
                                   double *out);

// Parses a catalog name or an expression in `t` on `[lo, hi]`.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be writable.
enum BivarError bivar_function_parse(const char *text,
                                     double lo,
                                     double hi,
                                     struct BivarFunction **out);

// # Safety
// `f` must come from [`bivar_function_parse`] and not have been freed.
void bivar_function_free(struct BivarFunction *f);

// Number of components of the function's values; 0 for a null handle.
//
// # Safety
// `f` must be null or a live handle.
size_t bivar_function_dim(const struct BivarFunction *f);

// Writes `f(t)` as `2 * dim` interleaved doubles into `out`, which holds
// `out_len` doubles.
//
// # Safety
// `f` must be a live handle; `out` must hold `out_len` doubles.
enum BivarError bivar_function_eval(const struct BivarFunction *f,
                                    double t,
                                    double *out,
                                    size_t out_len);

// Estimates the variation of `f` under `p` against `k`. A diverging or
// unconverged estimate is still a success; inspect its status.
//
// # Safety
// Handles must be live; `k` must point to `2 * k_dim` doubles; `cfg` may be
// null for the defaults; `out` must be writable.
enum BivarError bivar_estimate(const struct BivarFunction *f,
                               const struct BivarPairing *p,
                               const double *k,
                               size_t k_dim,
                               const struct BivarRefineConfig *cfg,
                               struct BivarEstimate **out);

// # Safety
// `e` must come from [`bivar_estimate`] and not have been freed.
void bivar_estimate_free(struct BivarEstimate *e);

// Lower bound on the variation; NaN for a null handle.
//
// # Safety
// `e` must be null or a live handle.
double bivar_estimate_value(const struct BivarEstimate *e);

// # Safety
// `e` must be a live handle; `out` must be writable.
enum BivarError bivar_estimate_status(const struct BivarEstimate *e,
                                      enum BivarVariationStatus *out);

// Size of the final partition; 0 for a null handle.
//
// # Safety
// `e` must be null or a live handle.
size_t bivar_estimate_partition_size(const struct BivarEstimate *e);

// Serializes the estimate as JSON. Free the result with
// [`bivar_string_free`].
//
// # Safety
// `e` must be a live handle; `out` must be writable.
enum BivarError bivar_estimate_to_json(const struct BivarEstimate *e, char **out);

// `||f, h||_2G` on a shared interval. Fails with `BIVAR_ERROR_NOT_BOUNDED`
// or `BIVAR_ERROR_UNCONVERGED` when either variation estimate does not
// converge.
//
// # Safety
// Handles must be live; `k` must point to `2 * k_dim` doubles; `cfg` may be
// null; `out` must be writable.
enum BivarError bivar_bv_two_norm(const struct BivarFunction *f,
                                  const struct BivarFunction *h,
                                  const struct BivarPairing *p,
                                  const double *k,
                                  size_t k_dim,
                                  const struct BivarRefineConfig *cfg,
                                  double *out);

// Runs the randomized axiom checks on `p`. Writes the total failure count
// and, when `report_json` is non-null, the full report (free with
// [`bivar_string_free`]).
//
// # Safety
// `p` must be a live handle; `failures` must be writable; `report_json`
// may be null.
enum BivarError bivar_check_pairing_axioms(const struct BivarPairing *p,
                                           bool symmetric,
                                           size_t trials,
                                           uint64_t seed,
                                           size_t *failures,
                                           char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIVAR_H */
