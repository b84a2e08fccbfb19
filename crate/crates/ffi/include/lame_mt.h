#ifndef LAME_MT_H
#define LAME_MT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define LMT_REGION_LEN 24

typedef enum LmtStatus {
  LMT_STATUS_OK = 0,
  LMT_STATUS_NULL_POINTER = 1,
  LMT_STATUS_INVALID_UTF8 = 2,
  LMT_STATUS_DOMAIN = 3,
  LMT_STATUS_OVERFLOW = 4,
  LMT_STATUS_INDEX = 5,
  LMT_STATUS_INVALID_PARAMS = 6,
  LMT_STATUS_NON_CONVERGENCE = 7,
  LMT_STATUS_INTEGRAND_OVERFLOW = 8,
  LMT_STATUS_DIVERGENT = 9,
  LMT_STATUS_GRID = 10,
  LMT_STATUS_ALIASING = 11,
  LMT_STATUS_PARSE = 12,
  LMT_STATUS_IO = 13,
  LMT_STATUS_BUFFER_TOO_SMALL = 14,
  LMT_STATUS_PANIC = 15,
} LmtStatus;

/**
 * Single-mode bump forcing.
 */
typedef struct LmtBump LmtBump;

/**
 * Lamé constants and frequency.
 */
typedef struct LmtParams LmtParams;

/**
 * Radial weight V(|x|).
 */
typedef struct LmtWeight LmtWeight;

typedef struct LmtRatio {
  double numerator;
  double denominator;
  double ratio;
  /**
   * Nonzero when the weight vanishes somewhere the forcing does not.
   */
  bool flagged;
} LmtRatio;

typedef struct LmtLemmaRow {
  double mu;
  double a;
  /**
   * NUL-terminated region name.
   */
  char region[LMT_REGION_LEN];
  double value;
  double mt_norm_sq;
  double ratio;
  double quad_err;
} LmtLemmaRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *lmt_version(void);

/**
 * Message for the last failed call on this thread; empty after a success. The pointer stays
 * valid until the next call on the same thread.
 */
const char *lmt_last_error(void);

/**
 * Short name of a status code, a static NUL-terminated string.
 */
const char *lmt_status_name(enum LmtStatus status);

/**
 * J_ν(x) for integer or half-integer ν.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum LmtStatus lmt_bessel_j(double order, double x, double *out);

/**
 * Y_ν(x) for integer or half-integer ν.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum LmtStatus lmt_bessel_y(double order, double x, double *out);

/**
 * H^{(1)}_ν(x) = J_ν(x) + iY_ν(x).
 *
 * # Safety
 * `re` and `im` must be valid for writes.
 */
enum LmtStatus lmt_hankel1(double order, double x, double *re, double *im);

/**
 * Parses a weight such as `gauss:sigma=1` or `indicator:R=3`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` valid for a write.
 */
enum LmtStatus lmt_weight_parse(const char *spec, struct LmtWeight **out);

/**
 * V(ω⁻¹|x|), the weight seen after rescaling to unit frequency.
 *
 * # Safety
 * `w` must be a live handle and `out` valid for a write.
 */
enum LmtStatus lmt_weight_scale(const struct LmtWeight *w, double omega, struct LmtWeight **out);

/**
 * Mizohata–Takeuchi norm of the weight.
 *
 * # Safety
 * `w` must be a live handle and `out` valid for a write.
 */
enum LmtStatus lmt_weight_mt_norm(const struct LmtWeight *w, double *out);

/**
 * Weight value at radius `r`.
 *
 * # Safety
 * `w` must be a live handle and `out` valid for a write.
 */
enum LmtStatus lmt_weight_eval(const struct LmtWeight *w, double r, double *out);

/**
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void lmt_weight_free(struct LmtWeight *w);

/**
 * Lamé parameters; needs μ > 0, 2μ + λ > 0 and ω > 0.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum LmtStatus lmt_params_new(double lam, double mu, double omega, struct LmtParams **out);

/**
 * Pressure and shear wavenumbers.
 *
 * # Safety
 * `p` must be a live handle and `k_p`, `k_s` valid for writes.
 */
enum LmtStatus lmt_params_wavenumbers(const struct LmtParams *p, double *k_p, double *k_s);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void lmt_params_free(struct LmtParams *p);

/**
 * Bump forcing of angular mode `n` centred at radius `r0` with half-width `w`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum LmtStatus lmt_bump_new(int32_t n, double r0, double w, struct LmtBump **out);

/**
 * Parses `bump:n=0,r0=1,w=0.25`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` valid for a write.
 */
enum LmtStatus lmt_bump_parse(const char *spec, struct LmtBump **out);

/**
 * # Safety
 * `b` must be null or a handle not yet freed.
 */
void lmt_bump_free(struct LmtBump *b);

/**
 * ‖u‖_{L²(V)} against ω⁻²‖V‖_MT‖f‖_{L²(V⁻¹)} for the outgoing solution u.
 *
 * # Safety
 * All handles must be live and `out` valid for a write.
 */
enum LmtStatus lmt_thm1_ratio(const struct LmtBump *b,
                              const struct LmtParams *p,
                              const struct LmtWeight *w,
                              struct LmtRatio *out);

/**
 * The gradient version: ‖∇u‖_{L²(V)} against ω⁻¹‖V‖_MT‖f‖_{L²(V⁻¹)}.
 *
 * # Safety
 * All handles must be live and `out` valid for a write.
 */
enum LmtStatus lmt_thm2_ratio(const struct LmtBump *b,
                              const struct LmtParams *p,
                              const struct LmtWeight *w,
                              struct LmtRatio *out);

/**
 * Region integrals of one lemma (`"L4_3"` … `"L4_7"`) at order `mu`. Writes at most `cap`
 * rows to `rows` and the row count to `n_rows`. If `cap` is too small nothing is written
 * to `rows`, `n_rows` gets the required count and the call returns
 * `LMT_STATUS_BUFFER_TOO_SMALL`; passing `rows = NULL, cap = 0` queries the count.
 *
 * # Safety
 * `id` must be a NUL-terminated string, `w` a live handle, `rows` valid for `cap` writes
 * and `n_rows` valid for a write.
 */
enum LmtStatus lmt_lemma_rows(const char *id,
                              double mu,
                              double a,
                              const struct LmtWeight *w,
                              struct LmtLemmaRow *rows,
                              size_t cap,
                              size_t *n_rows);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LAME_MT_H */
