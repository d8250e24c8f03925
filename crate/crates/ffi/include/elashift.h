#ifndef ELASHIFT_H
#define ELASHIFT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ElashiftStatus {
  ELASHIFT_STATUS_OK = 0,
  ELASHIFT_STATUS_NULL_POINTER = 1,
  ELASHIFT_STATUS_DOMAIN = 2,
  ELASHIFT_STATUS_DEGENERATE = 3,
  ELASHIFT_STATUS_CONFIG = 4,
  ELASHIFT_STATUS_IO = 5,
  ELASHIFT_STATUS_PARSE = 6,
  /**
   * The caller's output buffer has the wrong length.
   */
  ELASHIFT_STATUS_BUFFER_SIZE = 7,
  ELASHIFT_STATUS_PANIC = 8,
} ElashiftStatus;

typedef enum ElashiftFeatureStatus {
  ELASHIFT_FEATURE_STATUS_OK = 0,
  ELASHIFT_FEATURE_STATUS_DEGENERATE = 1,
  ELASHIFT_FEATURE_STATUS_NON_FINITE = 2,
} ElashiftFeatureStatus;

/**
 * A Gaussian embedding from D to d dimensions.
 */
typedef struct ElashiftEmbedding ElashiftEmbedding;

/**
 * The 61 features of one sample.
 */
typedef struct ElashiftFeatures ElashiftFeatures;

/**
 * A benchmark function instance.
 */
typedef struct ElashiftInstance ElashiftInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a
 * successful call. Valid until the next call into the library from this
 * thread.
 */
const char *elashift_last_error(void);

/**
 * Number of features in the schema (61).
 */
size_t elashift_feature_count(void);

/**
 * NUL-terminated name of feature `index`, or null when out of range. The
 * string is static.
 */
const char *elashift_feature_name(size_t index);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum ElashiftStatus elashift_instance_new(uint32_t function_id,
                                          uint32_t instance_id,
                                          size_t dimension,
                                          struct ElashiftInstance **out);

/**
 * # Safety
 * `instance` must come from [`elashift_instance_new`]; `x` must point to
 * `len` doubles and `value` to one writable double.
 */
enum ElashiftStatus elashift_instance_evaluate(const struct ElashiftInstance *instance,
                                               const double *x,
                                               size_t len,
                                               double *value);

/**
 * Optimum value of the instance.
 *
 * # Safety
 * `instance` must come from [`elashift_instance_new`] and `value` must be writable.
 */
enum ElashiftStatus elashift_instance_f_opt(const struct ElashiftInstance *instance, double *value);

/**
 * # Safety
 * `instance` must come from [`elashift_instance_new`] or be null, and must
 * not be used afterwards.
 */
void elashift_instance_free(struct ElashiftInstance *instance);

/**
 * Latin hypercube sample of `[-5, 5]^dimension`, written row-major into
 * `out` (`sample_size * dimension` doubles).
 *
 * # Safety
 * `out` must point to `out_len` writable doubles.
 */
enum ElashiftStatus elashift_lhs(size_t sample_size,
                                 size_t dimension,
                                 uint64_t seed,
                                 double *out,
                                 size_t out_len);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum ElashiftStatus elashift_embedding_new(size_t reduced_dim,
                                           size_t ambient_dim,
                                           uint64_t seed,
                                           struct ElashiftEmbedding **out);

/**
 * Projects `rows` points of the ambient dimension; `out` receives
 * `rows * reduced_dim` doubles.
 *
 * # Safety
 * `embedding` must come from [`elashift_embedding_new`]; `points` must hold
 * `rows * cols` doubles and `out` `out_len` writable doubles.
 */
enum ElashiftStatus elashift_embedding_project(const struct ElashiftEmbedding *embedding,
                                               const double *points,
                                               size_t rows,
                                               size_t cols,
                                               double *out,
                                               size_t out_len);

/**
 * # Safety
 * `embedding` must come from [`elashift_embedding_new`] or be null, and
 * must not be used afterwards.
 */
void elashift_embedding_free(struct ElashiftEmbedding *embedding);

/**
 * Computes all features of `rows` points (row-major, `cols` wide) with
 * objective values `y`.
 *
 * # Safety
 * `points` must hold `rows * cols` doubles, `y` `rows` doubles, and `out`
 * must be a valid pointer to a handle slot.
 */
enum ElashiftStatus elashift_features_compute(const double *points,
                                              size_t rows,
                                              size_t cols,
                                              const double *y,
                                              uint64_t seed,
                                              struct ElashiftFeatures **out);

/**
 * Value and status of feature `index`. Missing values are NaN.
 *
 * # Safety
 * `features` must come from [`elashift_features_compute`]; `value` and
 * `status` must be writable.
 */
enum ElashiftStatus elashift_features_get(const struct ElashiftFeatures *features,
                                          size_t index,
                                          double *value,
                                          enum ElashiftFeatureStatus *status);

/**
 * # Safety
 * `features` must come from [`elashift_features_compute`] or be null, and
 * must not be used afterwards.
 */
void elashift_features_free(struct ElashiftFeatures *features);

/**
 * `(projected - reference) / (|reference| + 1e-9)`.
 */
double elashift_relative_shift(double projected, double reference);

/**
 * Per-feature shifts into `out` (61 doubles); NaN where either side is not ok.
 *
 * # Safety
 * Both handles must come from [`elashift_features_compute`]; `out` must
 * point to `out_len` writable doubles.
 */
enum ElashiftStatus elashift_feature_shift(const struct ElashiftFeatures *projected,
                                           const struct ElashiftFeatures *reference,
                                           double *out,
                                           size_t out_len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *elashift_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELASHIFT_H */
