#ifndef GRAMXENT_H
#define GRAMXENT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call; `Ok` is zero.
 */
typedef enum GxStatus {
  GX_STATUS_OK = 0,
  GX_STATUS_NULL_POINTER = 1,
  GX_STATUS_INVALID_ARGUMENT = 2,
  GX_STATUS_OVERFLOW = 3,
  GX_STATUS_DEGENERATE = 4,
  GX_STATUS_CONTRACT = 5,
  GX_STATUS_ALPHA_NEAR_ONE = 6,
  GX_STATUS_NUMERICAL = 7,
  GX_STATUS_IO = 8,
  GX_STATUS_PANIC = 9,
} GxStatus;

typedef enum GxKernelFamily {
  GX_KERNEL_FAMILY_GAUSSIAN = 0,
  GX_KERNEL_FAMILY_EXPONENTIAL_INNER_PRODUCT = 1,
} GxKernelFamily;

/**
 * Rectangular cross-Gram matrix between two sample sets.
 */
typedef struct GxCrossGram GxCrossGram;

/**
 * Symmetric positive semidefinite Gram matrix.
 */
typedef struct GxGram GxGram;

/**
 * Row-major sample matrix, n points of dimension d.
 */
typedef struct GxSampleSet GxSampleSet;

/**
 * Value of a cross-entropy estimate plus its diagnostics.
 */
typedef struct GxEstimate {
  /**
   * May be +inf (support failure) or -inf (vanishing CIP with alpha > 1).
   */
  double value;
  /**
   * Eigenvalues clamped to zero while forming matrix functions.
   */
  size_t clamp_count;
  /**
   * Nonzero when a support check ran; the next two fields are then meaningful.
   */
  int32_t support_checked;
  int32_t support_included;
  double support_residual;
  /**
   * Nonzero when the cross-information potential underflowed.
   */
  int32_t zero_cip;
} GxEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or NULL if the
 * last call succeeded. The pointer stays valid until the next `gx_*` call
 * on the same thread.
 */
const char *gx_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gx_version(void);

/**
 * Copies `n * d` row-major values into a new sample set.
 *
 * # Safety
 * `data` must point to `n * d` readable doubles; `out` must be writable.
 */
enum GxStatus gx_sample_set_new(const double *data, size_t n, size_t d, struct GxSampleSet **out);

/**
 * # Safety
 * `set` must be NULL or a handle from `gx_sample_set_new` not yet freed.
 */
void gx_sample_set_free(struct GxSampleSet *set);

/**
 * Gram matrix of `samples` under the given kernel (raw, not normalized).
 *
 * # Safety
 * `samples` must be a live handle; `out` must be writable.
 */
enum GxStatus gx_gram_new(enum GxKernelFamily family,
                          double bandwidth,
                          const struct GxSampleSet *samples,
                          struct GxGram **out);

/**
 * Wraps an n x n row-major symmetric PSD matrix.
 *
 * # Safety
 * `data` must point to `n * n` readable doubles; `out` must be writable.
 */
enum GxStatus gx_gram_from_values(const double *data, size_t n, struct GxGram **out);

/**
 * New handle holding `gram / trace(gram)`.
 *
 * # Safety
 * `gram` must be a live handle; `out` must be writable.
 */
enum GxStatus gx_gram_normalize_trace(const struct GxGram *gram, struct GxGram **out);

/**
 * Side length of the matrix, 0 for NULL.
 *
 * # Safety
 * `gram` must be NULL or a live handle.
 */
size_t gx_gram_size(const struct GxGram *gram);

/**
 * Copies the matrix row-major into `buf`, which must hold `len >= n * n` doubles.
 *
 * # Safety
 * `gram` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum GxStatus gx_gram_copy_values(const struct GxGram *gram, double *buf, size_t len);

/**
 * # Safety
 * `gram` must be NULL or a handle from this library not yet freed.
 */
void gx_gram_free(struct GxGram *gram);

/**
 * Cross-Gram matrix k(x_i, y_j) between two sample sets of equal dimension.
 *
 * # Safety
 * `x` and `y` must be live handles; `out` must be writable.
 */
enum GxStatus gx_cross_gram_new(enum GxKernelFamily family,
                                double bandwidth,
                                const struct GxSampleSet *x,
                                const struct GxSampleSet *y,
                                struct GxCrossGram **out);

/**
 * # Safety
 * `cross` must be NULL or a handle from `gx_cross_gram_new` not yet freed.
 */
void gx_cross_gram_free(struct GxCrossGram *cross);

/**
 * Non-mirrored cross-entropy of unit-trace `k1`, `k2`.
 *
 * # Safety
 * `k1`, `k2` must be live handles; `out` must be writable.
 */
enum GxStatus gx_nonmirrored(const struct GxGram *k1,
                             const struct GxGram *k2,
                             double alpha,
                             struct GxEstimate *out);

/**
 * Non-mirrored cross-entropy for Grams of arbitrary positive trace.
 *
 * # Safety
 * `k1`, `k2` must be live handles; `out` must be writable.
 */
enum GxStatus gx_nonmirrored_raw(const struct GxGram *k1,
                                 const struct GxGram *k2,
                                 double alpha,
                                 struct GxEstimate *out);

/**
 * Mirrored cross-entropy of unit-trace `k1`, `k2`.
 *
 * # Safety
 * `k1`, `k2` must be live handles; `out` must be writable.
 */
enum GxStatus gx_mirrored(const struct GxGram *k1,
                          const struct GxGram *k2,
                          double alpha,
                          struct GxEstimate *out);

/**
 * Mirrored cross-entropy for Grams of arbitrary positive trace.
 *
 * # Safety
 * `k1`, `k2` must be live handles; `out` must be writable.
 */
enum GxStatus gx_mirrored_raw(const struct GxGram *k1,
                              const struct GxGram *k2,
                              double alpha,
                              struct GxEstimate *out);

/**
 * Two-parameter mirrored cross-entropy; `beta == alpha` matches `gx_mirrored`.
 *
 * # Safety
 * `k1`, `k2` must be live handles; `out` must be writable.
 */
enum GxStatus gx_mirrored_two_param(const struct GxGram *k1,
                                    const struct GxGram *k2,
                                    double alpha,
                                    double beta,
                                    struct GxEstimate *out);

/**
 * Umegaki relative entropy tr(k1 (log k1 - log k2)), the alpha -> 1 limit.
 *
 * # Safety
 * `k1`, `k2` must be live handles; `out` must be writable.
 */
enum GxStatus gx_umegaki(const struct GxGram *k1, const struct GxGram *k2, struct GxEstimate *out);

/**
 * Tripartite cross-entropy from raw Grams `k1` (n x n), `k12` (n x m), `k2` (m x m).
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum GxStatus gx_tripartite(const struct GxGram *k1,
                            const struct GxCrossGram *k12,
                            const struct GxGram *k2,
                            double alpha,
                            struct GxEstimate *out);

/**
 * Cross-information potential mean(k1) + mean(k2) - 2 mean(k12).
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
enum GxStatus gx_cross_information_potential(const struct GxGram *k1,
                                             const struct GxCrossGram *k12,
                                             const struct GxGram *k2,
                                             double *out);

/**
 * Matrix-based Renyi entropy of a unit-trace Gram.
 *
 * # Safety
 * `k` must be a live handle; `out` must be writable.
 */
enum GxStatus gx_renyi_entropy(const struct GxGram *k, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAMXENT_H */
