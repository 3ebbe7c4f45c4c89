/* C interface for the fpod punctuation-restoration engine. */

#ifndef FPOD_H
#define FPOD_H

/* Generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every fallible call.
 */
typedef enum FpodStatus {
  FPOD_STATUS_OK = 0,
  /**
   * A pointer argument was null or a parameter was out of range.
   */
  FPOD_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  FPOD_STATUS_INVALID_UTF8 = 2,
  /**
   * Building or loading the model failed.
   */
  FPOD_STATUS_MODEL_ERROR = 3,
  /**
   * Decoding failed.
   */
  FPOD_STATUS_DECODE_ERROR = 4,
} FpodStatus;

/**
 * Opaque engine handle: a model plus template, window, and recursion
 * settings.
 */
typedef struct FpodEngine FpodEngine;

/**
 * Decode cost counters mirrored from the Rust result type.
 */
typedef struct FpodCounters {
  uint64_t passes;
  uint64_t full_forward_calls;
  uint64_t step_calls;
  uint64_t inserted_puncts;
  uint64_t deleted_spaces;
} FpodCounters;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * is valid until the next failing call on the same thread.
 */
const char *fpod_last_error_message(void);

/**
 * Create an engine around a persisted n-gram model file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum FpodStatus fpod_engine_from_ngram_file(const char *path, struct FpodEngine **out);

/**
 * Create an engine around a lookup oracle built from a punctuated corpus
 * file (one JSON object per line with a "reference" field).
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum FpodStatus fpod_engine_from_corpus_oracle(const char *path,
                                               size_t context_order,
                                               struct FpodEngine **out);

/**
 * Create an engine around a remote model server (newline-delimited JSON
 * over TCP at `addr`, e.g. "127.0.0.1:9000").
 *
 * # Safety
 * `addr` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum FpodStatus fpod_engine_from_remote(const char *addr, struct FpodEngine **out);

/**
 * Release an engine. Null is ignored.
 *
 * # Safety
 * `engine` must have come from an `fpod_engine_*` constructor and must not
 * be used afterwards.
 */
void fpod_engine_free(struct FpodEngine *engine);

/**
 * Cap the number of recursive decoding passes (minimum 1).
 *
 * # Safety
 * `engine` must be a live engine handle.
 */
enum FpodStatus fpod_engine_set_max_passes(struct FpodEngine *engine, uint64_t max_passes);

/**
 * Set the sliding-window geometry (core length >= 1, pad per side).
 *
 * # Safety
 * `engine` must be a live engine handle.
 */
enum FpodStatus fpod_engine_set_window(struct FpodEngine *engine, size_t core_len, size_t pad_len);

/**
 * Replace the punctuation set, e.g. ",.?!".
 *
 * # Safety
 * `engine` must be a live engine handle and `marks` a valid string.
 */
enum FpodStatus fpod_engine_set_puncts(struct FpodEngine *engine, const char *marks);

/**
 * Restore punctuation with recursive windowed forward-pass decoding.
 * `out_text` receives a heap string (free with [`fpod_string_free`]);
 * `out_counters` may be null.
 *
 * # Safety
 * `engine` must be a live engine handle, `text` a valid NUL-terminated
 * string, and `out_text` a valid pointer.
 */
enum FpodStatus fpod_restore(const struct FpodEngine *engine,
                             const char *text,
                             char **out_text,
                             struct FpodCounters *out_counters);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `text` must have been returned through an out parameter of this library
 * and must not be used afterwards.
 */
void fpod_string_free(char *text);

/**
 * Expected tokens produced by one recursive decode over a window of
 * `window` tokens at acceptance rate `alpha`: (1 - alpha^L) / (1 - alpha).
 */
enum FpodStatus fpod_expected_tokens(double alpha, uint32_t window, double *out);

/**
 * Expected speedup over sequential generation: eta * expected tokens.
 */
enum FpodStatus fpod_improvement_factor(double alpha, double eta, uint32_t window, double *out);

/**
 * Back out the time-efficiency factor from a measured speedup.
 */
enum FpodStatus fpod_estimate_eta(double measured_if, double alpha, uint32_t window, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPOD_H */
