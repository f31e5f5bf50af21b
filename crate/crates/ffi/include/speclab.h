#ifndef SPECLAB_H
#define SPECLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpeclabStatus {
  SPECLAB_STATUS_OK = 0,
  SPECLAB_STATUS_NULL_POINTER = 1,
  SPECLAB_STATUS_INVALID_ARGUMENT = 2,
  SPECLAB_STATUS_IO = 3,
  SPECLAB_STATUS_PARSE = 4,
  SPECLAB_STATUS_INVALID_MATRIX_SET = 5,
  SPECLAB_STATUS_DIMENSION_MISMATCH = 6,
  SPECLAB_STATUS_NUMERICAL = 7,
  SPECLAB_STATUS_PRECONDITION = 8,
  SPECLAB_STATUS_BUFFER_TOO_SMALL = 9,
  SPECLAB_STATUS_PANIC = 10,
} SpeclabStatus;

typedef enum SpeclabAlgebraKind {
  SPECLAB_ALGEBRA_KIND_LIE = 0,
  SPECLAB_ALGEBRA_KIND_JORDAN = 1,
} SpeclabAlgebraKind;

/**
 * Opaque square complex matrix.
 */
typedef struct SpeclabMatrix SpeclabMatrix;

/**
 * Opaque validated matrix set.
 */
typedef struct SpeclabMatrixSet SpeclabMatrixSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next speclab call on the same thread.
 */
const char *speclab_last_error(void);

/**
 * Static, nul-terminated library version.
 */
const char *speclab_version(void);

/**
 * Builds an `n x n` matrix from row-major real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must point to `n * n` readable doubles; `out_matrix` must
 * be writable.
 */
enum SpeclabStatus speclab_matrix_new(size_t n,
                                      const double *re,
                                      const double *im,
                                      struct SpeclabMatrix **out_matrix);

/**
 * # Safety
 * `m` must be null or a handle from this library that was not yet freed.
 */
void speclab_matrix_free(struct SpeclabMatrix *m);

/**
 * Dimension of `m`, or 0 when `m` is null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t speclab_matrix_dim(const struct SpeclabMatrix *m);

/**
 * Copies the entries of `m` into caller buffers of length `n * n`.
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` must point to `capacity`
 * writable doubles.
 */
enum SpeclabStatus speclab_matrix_entries(const struct SpeclabMatrix *m,
                                          double *re,
                                          double *im,
                                          size_t capacity);

/**
 * Loads a matrix set from a JSON file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out_set` must be writable.
 */
enum SpeclabStatus speclab_matrix_set_load(const char *path, struct SpeclabMatrixSet **out_set);

/**
 * Parses a matrix set from JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out_set` must be writable.
 */
enum SpeclabStatus speclab_matrix_set_parse(const char *json, struct SpeclabMatrixSet **out_set);

/**
 * # Safety
 * `set` must be null or a live handle.
 */
void speclab_matrix_set_free(struct SpeclabMatrixSet *set);

/**
 * Number of matrices in `set`, or 0 when `set` is null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t speclab_matrix_set_len(const struct SpeclabMatrixSet *set);

/**
 * Copies the matrix named `name` out of `set` into a new handle.
 *
 * # Safety
 * `set` must be a live handle, `name` a nul-terminated string and
 * `out_matrix` writable.
 */
enum SpeclabStatus speclab_matrix_set_get(const struct SpeclabMatrixSet *set,
                                          const char *name,
                                          struct SpeclabMatrix **out_matrix);

/**
 * Eigenvalues of `m` with multiple eigenvalues polished to cluster
 * centroids. Writes `n` values and stores `n` in `out_len`.
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` must point to `capacity`
 * writable doubles; `out_len` must be writable.
 */
enum SpeclabStatus speclab_spectrum(const struct SpeclabMatrix *m,
                                    double atol,
                                    double rtol,
                                    double *re,
                                    double *im,
                                    size_t capacity,
                                    size_t *out_len);

/**
 * Stores whether `m` is nilpotent.
 *
 * # Safety
 * `m` must be a live handle and `out_nilpotent` writable.
 */
enum SpeclabStatus speclab_is_nilpotent(const struct SpeclabMatrix *m,
                                        double atol,
                                        double rtol,
                                        bool *out_nilpotent);

/**
 * Exact T-stability test: stores whether `det(t - A - lambda T)` is
 * independent of `lambda`.
 *
 * # Safety
 * `a` and `t` must be live handles and `out_holds` writable.
 */
enum SpeclabStatus speclab_t_stable(const struct SpeclabMatrix *a,
                                    const struct SpeclabMatrix *t,
                                    double atol,
                                    double rtol,
                                    bool *out_holds);

/**
 * Simultaneous unitary triangularization of every matrix in `set`. On
 * success `out_triangularized` tells whether a full chain was found and
 * `out_residual` receives the worst relative below-diagonal residual (or
 * NaN when no chain exists).
 *
 * # Safety
 * `set` must be a live handle; both out pointers must be writable.
 */
enum SpeclabStatus speclab_triangularize(const struct SpeclabMatrixSet *set,
                                         double atol,
                                         double rtol,
                                         uint64_t seed,
                                         bool *out_triangularized,
                                         double *out_residual);

/**
 * Runs the theorem-verdict engine on the closure of `set` and returns the
 * verdict as a JSON string to be released with [`speclab_string_free`].
 * `kind` is a [`SpeclabAlgebraKind`] value.
 *
 * # Safety
 * `set` must be a live handle and `out_json` writable.
 */
enum SpeclabStatus speclab_verdict_json(const struct SpeclabMatrixSet *set,
                                        uint32_t kind,
                                        double atol,
                                        double rtol,
                                        uint64_t seed,
                                        char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void speclab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECLAB_H */
