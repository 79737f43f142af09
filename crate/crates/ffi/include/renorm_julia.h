#ifndef RENORM_JULIA_H
#define RENORM_JULIA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define RJ_OK 0

#define RJ_ERR_NULL -1

#define RJ_ERR_INVALID_PARAMETER -2

#define RJ_ERR_POLE -3

#define RJ_ERR_DOMAIN -4

#define RJ_ERR_BRANCH_AMBIGUITY -5

#define RJ_ERR_NON_CONVERGENCE -6

#define RJ_ERR_TRUNCATION -7

#define RJ_ERR_UNDECIDED -8

#define RJ_ERR_NON_CONTRACTION -9

#define RJ_ERR_RESONANCE -10

#define RJ_ERR_UNSUPPORTED_ORDER -11

#define RJ_ERR_SIZE_GUARD -12

#define RJ_ERR_BUFFER_TOO_SMALL -13

#define RJ_ERR_PANIC -99

/**
 * Potential kinds written by [`rj_green_potential`].
 */
#define RJ_POTENTIAL_BASIN 0

#define RJ_POTENTIAL_CENTER 1

#define RJ_POTENTIAL_OUTSIDE 2

/**
 * Opaque map handle.
 */
typedef struct RjMap RjMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null.
 */
const char *rj_status_name(int32_t code);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t rj_last_error(char *buf, uintptr_t len);

/**
 * Creates a map for branching number `b >= 2` with the default series
 * truncation.
 *
 * # Safety
 * `out` must be a valid pointer to an `RjMap *`.
 */
int32_t rj_map_new(uint32_t b, struct RjMap **out);

/**
 * Releases a map. Null is ignored.
 *
 * # Safety
 * `m` must come from [`rj_map_new`] and not be used afterwards.
 */
void rj_map_free(struct RjMap *m);

/**
 * Overrides the series truncation used by [`rj_free_energy`].
 *
 * # Safety
 * `m` must be a live handle.
 */
int32_t rj_map_set_truncation(struct RjMap *m, double tol, uintptr_t max_terms);

/**
 * Branching number of a map, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
uint32_t rj_map_b(const struct RjMap *m);

/**
 * `f(t)` on the sphere. `*is_infinity` is set to 1 when the image is the
 * point at infinity, in which case `re` and `im` are left untouched.
 *
 * # Safety
 * `m` must be a live handle and the out-pointers valid.
 */
int32_t rj_map_eval(const struct RjMap *m,
                    double re,
                    double im,
                    double *out_re,
                    double *out_im,
                    int32_t *is_infinity);

/**
 * `F` and its first `order` derivatives at `t`, written as interleaved
 * `(re, im)` pairs into `out`, which must hold `2 * (order + 1)` doubles.
 *
 * # Safety
 * `m` must be a live handle and `out` point to `out_len` doubles.
 */
int32_t rj_free_energy(const struct RjMap *m,
                       double re,
                       double im,
                       uintptr_t order,
                       double *out,
                       uintptr_t out_len);

/**
 * Green potential of the basin of 0. `*kind` is one of the
 * `RJ_POTENTIAL_*` values; `*value` is the potential for a basin point,
 * `+inf` at the center and NaN outside.
 *
 * # Safety
 * `m` must be a live handle and the out-pointers valid.
 */
int32_t rj_green_potential(const struct RjMap *m,
                           double re,
                           double im,
                           double tol,
                           int32_t *kind,
                           double *value);

/**
 * Point of the basin at Böttcher angle `theta` (turns) and potential `g > 0`.
 *
 * # Safety
 * `m` must be a live handle and the out-pointers valid.
 */
int32_t rj_geodesic_point(const struct RjMap *m,
                          double theta,
                          double g,
                          double *out_re,
                          double *out_im);

/**
 * Cylinder-sum pressure of `-kappa ln|beta|` at tree depth `depth`.
 *
 * # Safety
 * `m` must be a live handle and `out` valid.
 */
int32_t rj_pressure(const struct RjMap *m, double kappa, uintptr_t depth, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RENORM_JULIA_H */
