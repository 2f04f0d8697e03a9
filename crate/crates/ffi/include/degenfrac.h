#ifndef DEGENFRAC_H
#define DEGENFRAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DFRC_OK 0

/**
 * A required pointer argument was null.
 */
#define DFRC_ERR_NULL 1

/**
 * Buffer length does not match what the call needs.
 */
#define DFRC_ERR_LENGTH 2

/**
 * String argument is not valid UTF-8.
 */
#define DFRC_ERR_UTF8 3

#define DFRC_ERR_UNKNOWN_MODEL 4

#define DFRC_ERR_BAD_PARAMS 5

#define DFRC_ERR_DOMAIN 6

#define DFRC_ERR_NONCONVERGENCE 7

#define DFRC_ERR_SINGULAR 8

/**
 * Any other numerical failure.
 */
#define DFRC_ERR_NUMERICAL 9

#define DFRC_ERR_CONFIG 10

/**
 * A Rust panic was caught at the boundary.
 */
#define DFRC_ERR_PANIC 11

/**
 * Opaque model handle: a registry model with its grid.
 */
typedef struct DfrcModel DfrcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated to `len`) into
 * `buf` and returns the full message length plus one. Pass a null `buf` to query the size.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t dfrc_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dfrc_version(void);

/**
 * E_{β,γ}(z).
 *
 * # Safety
 * `out_re` and `out_im` must be valid for writes.
 */
int32_t dfrc_ml_eval(double beta,
                     double gamma,
                     double z_re,
                     double z_im,
                     double *out_re,
                     double *out_im);

/**
 * Admissible upper bound for ν′ given exponents q_0 = 0 < q_1 ≤ … ≤ q_n.
 *
 * # Safety
 * `q` must point to `n` readable values and `out` must be valid for writes.
 */
int32_t dfrc_admissible_nu_bound(const uint32_t *q, size_t n, double *out);

/**
 * Creates a registry model ("rossby", "sobolev", …) on its default grid.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be valid for writes.
 */
int32_t dfrc_model_new(const char *name, struct DfrcModel **out);

/**
 * Releases a handle from `dfrc_model_new`; null is ignored.
 *
 * # Safety
 * `model` must be null or a live handle that is not used afterwards.
 */
void dfrc_model_free(struct DfrcModel *model);

/**
 * Replaces the grid with `sizes[0..n]` (powers of two ≥ 4, period 2π per axis).
 *
 * # Safety
 * `model` must be a live handle and `sizes` must point to `n` readable values.
 */
int32_t dfrc_model_set_grid(struct DfrcModel *model, const size_t *sizes, size_t n);

/**
 * Component count m, spatial dimension n and grid point count.
 *
 * # Safety
 * `model` must be a live handle; each output pointer must be null or valid for writes.
 */
int32_t dfrc_model_dims(const struct DfrcModel *model, size_t *m, size_t *n, size_t *points);

/**
 * Mode-wise solution at z = t_re + i·t_im. `data` and `out` hold physical-side fields as
 * interleaved (re, im) pairs, component-major, row-major grid order: `len` = 2·m·points doubles.
 *
 * # Safety
 * `model` must be a live handle; `data` and `out` must each point to `len` doubles.
 */
int32_t dfrc_solve_modewise(const struct DfrcModel *model,
                            const double *data,
                            double t_re,
                            double t_im,
                            double *out,
                            size_t len);

/**
 * Runs one verification criterion (1..14) with the given seed over all registry models;
 * `passed` receives 1 or 0.
 *
 * # Safety
 * `passed` must be valid for writes.
 */
int32_t dfrc_verify_criterion(uint32_t id, uint64_t seed, int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEGENFRAC_H */
