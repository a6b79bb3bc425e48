#ifndef LYRIMETER_H
#define LYRIMETER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LyrimeterStatus {
  LYRIMETER_STATUS_OK = 0,
  LYRIMETER_STATUS_NULL_POINTER = 1,
  LYRIMETER_STATUS_INVALID_UTF8 = 2,
  LYRIMETER_STATUS_IO = 3,
  LYRIMETER_STATUS_FORMAT = 4,
  LYRIMETER_STATUS_DEGENERATE = 5,
  LYRIMETER_STATUS_ARGUMENT = 6,
  LYRIMETER_STATUS_NOT_FOUND = 7,
  LYRIMETER_STATUS_BUFFER_TOO_SMALL = 8,
  LYRIMETER_STATUS_PANIC = 9,
} LyrimeterStatus;

typedef enum LyrimeterTimeSignature {
  LYRIMETER_TIME_SIGNATURE_THREE_FOUR = 0,
  LYRIMETER_TIME_SIGNATURE_FOUR_FOUR = 1,
} LyrimeterTimeSignature;

/**
 * Pronunciation dictionary.
 */
typedef struct LyrimeterLexicon LyrimeterLexicon;

/**
 * Trained model together with the feature configuration it expects.
 */
typedef struct LyrimeterModel LyrimeterModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lyrimeter_version(void);

/**
 * Description of the last failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *lyrimeter_last_error(void);

/**
 * The dictionary compiled into the library.
 *
 * # Safety
 * `out_lexicon` must be valid for writes.
 */
enum LyrimeterStatus lyrimeter_lexicon_bundled(struct LyrimeterLexicon **out_lexicon);

/**
 * Loads a dictionary in the CMU text format.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out_lexicon` valid for writes.
 */
enum LyrimeterStatus lyrimeter_lexicon_load(const char *path,
                                            struct LyrimeterLexicon **out_lexicon);

/**
 * Releases a lexicon; null is ignored.
 *
 * # Safety
 * `lexicon` must come from this library and not be used afterwards.
 */
void lyrimeter_lexicon_free(struct LyrimeterLexicon *lexicon);

/**
 * Stress digits (0, 1 or 2 per syllable) of `word`. Words missing from
 * the dictionary are scored by the vowel-group heuristic when `fallback`
 * is nonzero and fail with `NotFound` otherwise.
 *
 * `*out_len` always receives the syllable count on success or on
 * `BufferTooSmall`, so callers can size `buf` and retry.
 *
 * # Safety
 * `buf` must be valid for `cap` bytes (it may be null when `cap` is 0).
 */
enum LyrimeterStatus lyrimeter_stress_pattern(const struct LyrimeterLexicon *lexicon,
                                              const char *word,
                                              int32_t fallback,
                                              uint8_t *buf,
                                              size_t cap,
                                              size_t *out_len);

/**
 * Loads a model file written by `lyrimeter train`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out_model` valid for writes.
 */
enum LyrimeterStatus lyrimeter_model_load(const char *path, struct LyrimeterModel **out_model);

/**
 * Releases a model; null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void lyrimeter_model_free(struct LyrimeterModel *model);

/**
 * Number of features the model expects.
 *
 * # Safety
 * `model` must be a live handle and `out_dim` valid for writes.
 */
enum LyrimeterStatus lyrimeter_model_dimensionality(const struct LyrimeterModel *model,
                                                    size_t *out_dim);

/**
 * Probability of four-four time for a ready-made feature row, plus the
 * label at threshold 0.5. `out_label` may be null.
 *
 * # Safety
 * `features` must be valid for `len` doubles.
 */
enum LyrimeterStatus lyrimeter_model_predict_features(const struct LyrimeterModel *model,
                                                      const double *features,
                                                      size_t len,
                                                      double *out_probability,
                                                      enum LyrimeterTimeSignature *out_label);

/**
 * Featurizes one song's lyrics with the configuration stored in the
 * model and predicts its time signature. `lexicon` may be null to use
 * the bundled dictionary; `out_label` may be null.
 *
 * # Safety
 * `lyrics` must be a NUL-terminated string; handles must be live.
 */
enum LyrimeterStatus lyrimeter_model_predict_lyrics(const struct LyrimeterModel *model,
                                                    const struct LyrimeterLexicon *lexicon,
                                                    const char *lyrics,
                                                    double *out_probability,
                                                    enum LyrimeterTimeSignature *out_label);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LYRIMETER_H */
