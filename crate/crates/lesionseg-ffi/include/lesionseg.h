/* C interface for the lesionseg 2-D MR lesion segmentation library. */

#ifndef LESIONSEG_H
#define LESIONSEG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Error classes, aligned with the CLI exit codes.
 */
typedef enum LesionsegStatus {
  /**
   * Success.
   */
  LESIONSEG_STATUS_OK = 0,
  /**
   * Invalid parameter or malformed configuration.
   */
  LESIONSEG_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Missing, unreadable, or malformed input data.
   */
  LESIONSEG_STATUS_INPUT_ERROR = 2,
  /**
   * The pipeline could not produce a segmentation (e.g. empty mask).
   */
  LESIONSEG_STATUS_PIPELINE_ERROR = 3,
  /**
   * A required pointer was null or a buffer too small.
   */
  LESIONSEG_STATUS_NULL_POINTER = 4,
  /**
   * Unexpected internal failure.
   */
  LESIONSEG_STATUS_INTERNAL_ERROR = 5,
} LesionsegStatus;

/**
 * Opaque grayscale image handle.
 */
typedef struct LesionsegImage LesionsegImage;

/**
 * Opaque segmentation-result handle.
 */
typedef struct LesionsegResult LesionsegResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Most recent error message for this thread (empty string if none).
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *lesionseg_last_error_message(void);

/**
 * Create an image from a row-major `width * height` buffer of doubles.
 * Returns null if the pointer is null, a dimension is zero, or any value is
 * not finite.
 * # Safety
 * `pixels` must be null or point to at least `width * height` readable
 * doubles.
 */
struct LesionsegImage *lesionseg_image_create(uintptr_t width,
                                              uintptr_t height,
                                              const double *pixels);

/**
 * Load a PGM (P2/P5) or 8-bit grayscale PNG image from `path` (UTF-8).
 * # Safety
 * `path` must be null or a valid NUL-terminated C string.
 */
struct LesionsegImage *lesionseg_image_load(const char *path);

/**
 * Image width in pixels (0 for a null handle).
 * # Safety
 * `image` must be null or a live handle from this library.
 */
uintptr_t lesionseg_image_width(const struct LesionsegImage *image);

/**
 * Image height in pixels (0 for a null handle).
 * # Safety
 * `image` must be null or a live handle from this library.
 */
uintptr_t lesionseg_image_height(const struct LesionsegImage *image);

/**
 * Release an image handle (null is a no-op).
 * # Safety
 * `image` must be null or a handle from this library not freed before;
 * it must not be used afterwards.
 */
void lesionseg_image_free(struct LesionsegImage *image);

/**
 * Run the full segmentation pipeline. `config_json` may be null (defaults)
 * or a JSON document with any subset of the pipeline configuration keys;
 * unset keys take their defaults. Returns null on failure.
 * # Safety
 * `image` must be null or a live handle; `config_json` must be null or a
 * valid NUL-terminated C string.
 */
struct LesionsegResult *lesionseg_segment(const struct LesionsegImage *image,
                                          const char *config_json);

/**
 * Grid width of a result (0 for a null handle).
 * # Safety
 * `result` must be null or a live handle from this library.
 */
uintptr_t lesionseg_result_width(const struct LesionsegResult *result);

/**
 * Grid height of a result (0 for a null handle).
 * # Safety
 * `result` must be null or a live handle from this library.
 */
uintptr_t lesionseg_result_height(const struct LesionsegResult *result);

/**
 * Number of clusters used (0 for a null handle).
 * # Safety
 * `result` must be null or a live handle from this library.
 */
uintptr_t lesionseg_result_num_clusters(const struct LesionsegResult *result);

/**
 * Iterations the clustering ran (0 for a null handle).
 * # Safety
 * `result` must be null or a live handle from this library.
 */
uintptr_t lesionseg_result_iterations(const struct LesionsegResult *result);

/**
 * Copy the binary lesion mask (0/1 per pixel, row-major) into `out`.
 * # Safety
 * `result` must be null or a live handle; `out` must be null or point
 * to at least `len` writable elements.
 */
enum LesionsegStatus lesionseg_result_lesion_mask(const struct LesionsegResult *result,
                                                  uint8_t *out,
                                                  uintptr_t len);

/**
 * Copy the binary brain mask (0/1 per pixel, row-major) into `out`.
 * # Safety
 * `result` must be null or a live handle; `out` must be null or point
 * to at least `len` writable elements.
 */
enum LesionsegStatus lesionseg_result_brain_mask(const struct LesionsegResult *result,
                                                 uint8_t *out,
                                                 uintptr_t len);

/**
 * Copy the label map (0 = outside brain, 1..=c = cluster) into `out`.
 * # Safety
 * `result` must be null or a live handle; `out` must be null or point
 * to at least `len` writable elements.
 */
enum LesionsegStatus lesionseg_result_label_map(const struct LesionsegResult *result,
                                                uint8_t *out,
                                                uintptr_t len);

/**
 * Copy the estimated bias field (0 outside the brain) into `out`.
 * # Safety
 * `result` must be null or a live handle; `out` must be null or point
 * to at least `len` writable elements.
 */
enum LesionsegStatus lesionseg_result_bias_field(const struct LesionsegResult *result,
                                                 double *out,
                                                 uintptr_t len);

/**
 * Copy the ascending cluster centroids into `out` (capacity `len`).
 * # Safety
 * `result` must be null or a live handle; `out` must be null or point
 * to at least `len` writable elements.
 */
enum LesionsegStatus lesionseg_result_centroids(const struct LesionsegResult *result,
                                                double *out,
                                                uintptr_t len);

/**
 * Release a result handle (null is a no-op).
 * # Safety
 * `result` must be null or a handle from this library not freed before;
 * it must not be used afterwards.
 */
void lesionseg_result_free(struct LesionsegResult *result);

/**
 * Map a library error to the status it would produce; exposed so bindings
 * can share the convention. Never fails.
 */
const char *lesionseg_status_name(enum LesionsegStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LESIONSEG_H */
