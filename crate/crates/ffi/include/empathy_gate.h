#ifndef EMPATHY_GATE_H
#define EMPATHY_GATE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of values written by [`eg_hsv_features`].
 */
#define EG_HSV_WIDTH 6

/**
 * Result codes.
 */
typedef enum EgStatus {
  EG_STATUS_OK = 0,
  EG_STATUS_NULL_POINTER = 1,
  EG_STATUS_INVALID_UTF8 = 2,
  EG_STATUS_INVALID_ARGUMENT = 3,
  EG_STATUS_IO = 4,
  EG_STATUS_INVALID_BUNDLE = 5,
  EG_STATUS_RESOURCE = 6,
  EG_STATUS_PIPELINE = 7,
  EG_STATUS_UNDEFINED = 8,
  EG_STATUS_PANIC = 9,
} EgStatus;

/**
 * A loaded bundle plus the resources it predicts with. Opaque to C.
 */
typedef struct EgBundle EgBundle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next library call on this thread.
 */
const char *eg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *eg_version(void);

/**
 * Loads a bundle file. The lexicon, dictionary and imagery paths may be
 * null to use the bundled resources.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum EgStatus eg_bundle_load(const char *bundle_path,
                             const char *lexicon_path,
                             const char *dictionary_path,
                             const char *imagery_path,
                             struct EgBundle **out);

/**
 * Releases a bundle. Null is ignored.
 *
 * # Safety
 * `bundle` must come from [`eg_bundle_load`] and not be used afterwards.
 */
void eg_bundle_free(struct EgBundle *bundle);

/**
 * Number of resource-fingerprint warnings raised while loading.
 *
 * # Safety
 * `bundle` must be a live bundle; `out` must be writable.
 */
enum EgStatus eg_bundle_warning_count(const struct EgBundle *bundle, size_t *out);

/**
 * Feature-space width of the bundle.
 *
 * # Safety
 * `bundle` must be a live bundle; `out` must be writable.
 */
enum EgStatus eg_bundle_width(const struct EgBundle *bundle, size_t *out);

/**
 * Scores one text (and optional image path). Writes the ensemble
 * probability and the two base-model probabilities; `p_lr` and `p_rf` may
 * be null.
 *
 * # Safety
 * `bundle` must be a live bundle; strings NUL-terminated; `probability`
 * writable.
 */
enum EgStatus eg_bundle_predict_text(const struct EgBundle *bundle,
                                     const char *text,
                                     const char *image_path,
                                     double *probability,
                                     double *p_lr,
                                     double *p_rf);

/**
 * Replaces handles, URLs and e-mail addresses with placeholders. The
 * result is freed with [`eg_string_free`].
 *
 * # Safety
 * `text` must be NUL-terminated; `out` writable.
 */
enum EgStatus eg_anonymize(const char *text, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void eg_string_free(char *s);

/**
 * Fleiss' kappa over a row-major `n_items × n_raters` matrix of category
 * indices in `0..n_categories`. Returns `EG_STATUS_UNDEFINED` when every
 * rating uses one category.
 *
 * # Safety
 * `labels` must point to `n_items * n_raters` values; `out` writable.
 */
enum EgStatus eg_fleiss_kappa(const uint32_t *labels,
                              size_t n_items,
                              size_t n_raters,
                              size_t n_categories,
                              double *out);

/**
 * Hexcone RGB to HSV: hue in degrees, saturation and value in `[0, 1]`.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum EgStatus eg_rgb_to_hsv(uint8_t r, uint8_t g, uint8_t b, double *h, double *s, double *v);

/**
 * HSV statistics of a packed RGB8 image (`width * height * 3` bytes).
 * Writes [`EG_HSV_WIDTH`] values: hue cos mean, hue sin mean, hue mean in
 * degrees, hue resultant, saturation mean, value mean.
 *
 * # Safety
 * `rgb` must hold `width * height * 3` bytes; `out` must hold
 * [`EG_HSV_WIDTH`] doubles.
 */
enum EgStatus eg_hsv_features(const uint8_t *rgb, size_t width, size_t height, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMPATHY_GATE_H */
