/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#ifndef CORRLAB_H
#define CORRLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CorrlabStatus {
  CORRLAB_STATUS_OK = 0,
  CORRLAB_STATUS_NULL_POINTER = 1,
  CORRLAB_STATUS_INVALID_ARGUMENT = 2,
  CORRLAB_STATUS_DEGENERATE = 3,
  CORRLAB_STATUS_NO_CONVERGENCE = 4,
  CORRLAB_STATUS_CONFIG = 5,
  CORRLAB_STATUS_BUFFER_TOO_SMALL = 6,
  CORRLAB_STATUS_PANIC = 7,
} CorrlabStatus;

typedef struct CorrlabCorrespondence CorrlabCorrespondence;

typedef struct CorrlabHecke CorrlabHecke;

typedef struct CorrlabRaster CorrlabRaster;

typedef struct CorrlabComplex {
  double re;
  double im;
} CorrlabComplex;

/**
 * A point of the Riemann sphere; `re` and `im` are ignored when
 * `is_infinity` is set.
 */
typedef struct CorrlabPoint {
  double re;
  double im;
  bool is_infinity;
} CorrlabPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, nul-terminated and
 * truncated to `capacity`, and returns its full length in bytes (0 if none).
 *
 * # Safety
 * `buf` must be null or valid for `capacity` bytes.
 */
size_t corrlab_last_error_message(char *buf, size_t capacity);

/**
 * `J ∘ Cov₀^q` with `J(z) = (j[0] z + j[1]) / (j[2] z + j[3])` and
 * `q = num / den`, coefficients in ascending degree. Pass `den_len = 0` for
 * a polynomial `q`.
 *
 * # Safety
 * `j` must point to 4 values, `num` to `num_len`, `den` to `den_len`.
 */
enum CorrlabStatus corrlab_correspondence_new(const struct CorrlabComplex *j,
                                              const struct CorrlabComplex *num,
                                              size_t num_len,
                                              const struct CorrlabComplex *den,
                                              size_t den_len,
                                              struct CorrlabCorrespondence **out);

/**
 * The family `J(z) = -z`, `q = (t³ - 3kt) ∘ (az + 1)/(z + 1)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CorrlabStatus corrlab_mating_family_new(struct CorrlabComplex a,
                                             struct CorrlabComplex k,
                                             struct CorrlabCorrespondence **out);

/**
 * # Safety
 * `h` must be null or a handle from a `corrlab_*_new` correspondence
 * constructor that was not freed.
 */
void corrlab_correspondence_free(struct CorrlabCorrespondence *h);

/**
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
enum CorrlabStatus corrlab_correspondence_degree(const struct CorrlabCorrespondence *h,
                                                 size_t *out);

/**
 * Writes `F(z)` with multiplicity. `out_len` receives the number of points
 * even when the buffer is too small.
 *
 * # Safety
 * `h` must be a live handle, `out` valid for `capacity` points and
 * `out_len` valid for writes.
 */
enum CorrlabStatus corrlab_forward_image(const struct CorrlabCorrespondence *h,
                                         struct CorrlabPoint z,
                                         struct CorrlabPoint *out,
                                         size_t capacity,
                                         size_t *out_len);

/**
 * Writes `F⁻¹(w)`; see [`corrlab_forward_image`].
 *
 * # Safety
 * As for [`corrlab_forward_image`].
 */
enum CorrlabStatus corrlab_backward_image(const struct CorrlabCorrespondence *h,
                                          struct CorrlabPoint w,
                                          struct CorrlabPoint *out,
                                          size_t capacity,
                                          size_t *out_len);

/**
 * The standard Hecke group `H_{d+1}`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CorrlabStatus corrlab_hecke_standard_new(size_t d, struct CorrlabHecke **out);

/**
 * The representation with cross-ratio `kappa`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CorrlabStatus corrlab_hecke_new(size_t d,
                                     struct CorrlabComplex kappa,
                                     struct CorrlabHecke **out);

/**
 * # Safety
 * `h` must be null or a live Hecke handle.
 */
void corrlab_hecke_free(struct CorrlabHecke *h);

/**
 * Applies a word such as `"sr2sr"` to `z`.
 *
 * # Safety
 * `h` must be a live handle, `word` a nul-terminated string and `out`
 * valid for writes.
 */
enum CorrlabStatus corrlab_hecke_apply_word(const struct CorrlabHecke *h,
                                            const char *word,
                                            struct CorrlabPoint z,
                                            struct CorrlabPoint *out);

/**
 * Jørgensen's inequality over pairs of words up to `max_word_len`.
 * `passes` is false when some pair certifies non-discreteness.
 *
 * # Safety
 * `h` must be a live handle; `passes` and `worst_value` valid for writes.
 */
enum CorrlabStatus corrlab_hecke_jorgensen(const struct CorrlabHecke *h,
                                           size_t max_word_len,
                                           bool *passes,
                                           double *worst_value);

/**
 * Green's function of the polynomial with coefficients `coeffs` (ascending
 * degree) at `z`.
 *
 * # Safety
 * `coeffs` must point to `len` values and `out` be valid for writes.
 */
enum CorrlabStatus corrlab_green(const struct CorrlabComplex *coeffs_ptr,
                                 size_t len,
                                 struct CorrlabComplex z,
                                 size_t max_iter,
                                 double *out);

/**
 * Renders a JSON job. `threads = 0` uses the default pool.
 *
 * # Safety
 * `job_json` must be a nul-terminated string and `out` valid for writes.
 */
enum CorrlabStatus corrlab_render_job_json(const char *job_json,
                                           size_t threads,
                                           struct CorrlabRaster **out);

/**
 * # Safety
 * `r` must be null or a live raster handle.
 */
void corrlab_raster_free(struct CorrlabRaster *r);

/**
 * # Safety
 * `r` must be a live handle; `width` and `height` valid for writes.
 */
enum CorrlabStatus corrlab_raster_size(const struct CorrlabRaster *r,
                                       size_t *width,
                                       size_t *height);

/**
 * Row-major class codes. The pointer stays valid until the raster is freed.
 *
 * # Safety
 * `r` must be a live handle; `data` and `len` valid for writes.
 */
enum CorrlabStatus corrlab_raster_classes(const struct CorrlabRaster *r,
                                          const uint8_t **data,
                                          size_t *len);

/**
 * Copies the binary PPM encoding into `buf`; `out_len` receives its size
 * even when `capacity` is too small.
 *
 * # Safety
 * `r` must be a live handle, `buf` valid for `capacity` bytes and
 * `out_len` valid for writes.
 */
enum CorrlabStatus corrlab_raster_ppm(const struct CorrlabRaster *r,
                                      uint8_t *buf,
                                      size_t capacity,
                                      size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORRLAB_H */
