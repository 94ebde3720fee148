#ifndef POLARSHORT_H
#define POLARSHORT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of every call.
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_INVALID_PATTERN = 3,
  PS_STATUS_LENGTH_MISMATCH = 4,
  PS_STATUS_PANIC = 5,
} PsStatus;

// Shortening pattern generators.
typedef enum PsMethod {
  PS_METHOD_PD = 0,
  PS_METHOD_CW = 1,
  PS_METHOD_RQUP = 2,
} PsMethod;

// A shortened polar code together with its decoder state.
typedef struct PsCode PsCode;

// Sizes of a code.
typedef struct PsCodeInfo {
  size_t n;
  size_t n_short;
  size_t k;
} PsCodeInfo;

// Statistics of one simulated Eb/N0 point.
typedef struct PsSimPoint {
  double ebn0_db;
  uint64_t frames;
  uint64_t bit_errors;
  uint64_t frame_errors;
  double ber;
  double fer;
  double ci95_ber;
} PsSimPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL
// terminated, truncated to `len`) and returns the full message length
// without the terminator; 0 when the last call succeeded.
size_t ps_last_error(char *buf, size_t len);

// Toolkit version as a static NUL-terminated string.
const char *ps_version(void);

// Builds a code of mother length `n`, shortened to `n_short` by `method`,
// with `k` information bits. Pass `n_short == n` for the unshortened code.
enum PsStatus ps_code_new(size_t n,
                          size_t n_short,
                          size_t k,
                          enum PsMethod method,
                          double design_snr_db,
                          struct PsCode **out);

// Builds a code from an explicit pattern of `len` 1-based indices, which
// must be closed under bitwise supersets.
enum PsStatus ps_code_from_pattern(size_t n,
                                   const size_t *indices,
                                   size_t len,
                                   size_t k,
                                   double design_snr_db,
                                   struct PsCode **out);

// Releases a code; null is ignored.
void ps_code_free(struct PsCode *code);

enum PsStatus ps_code_info(const struct PsCode *code, struct PsCodeInfo *out);

// Writes the `k` information positions, ascending.
enum PsStatus ps_code_info_set(const struct PsCode *code, size_t *out, size_t len);

// Writes the `n - n_short` shortened positions.
enum PsStatus ps_code_pattern(const struct PsCode *code, size_t *out, size_t len);

// Encodes `k` message bits into `n_short` code bits.
enum PsStatus ps_encode(const struct PsCode *code,
                        const uint8_t *msg,
                        size_t msg_len,
                        uint8_t *out,
                        size_t out_len);

// SC-decodes `n_short` channel LLRs (positive favours bit 0) into `k`
// message bits.
enum PsStatus ps_decode(struct PsCode *code,
                        const double *llrs,
                        size_t llr_len,
                        uint8_t *out,
                        size_t out_len);

// Simulates one Eb/N0 point until `min_frame_errors` frame errors or
// `max_frames` frames.
enum PsStatus ps_simulate_point(const struct PsCode *code,
                                double ebn0_db,
                                uint64_t min_frame_errors,
                                uint64_t max_frames,
                                uint64_t seed,
                                struct PsSimPoint *out);

// Writes the `n` channel indices from most to least reliable.
enum PsStatus ps_rank(size_t n, double design_snr_db, size_t *out, size_t len);

// Writes the `n - n_short` indices shortened by `method`.
enum PsStatus ps_pattern(enum PsMethod method,
                         size_t n,
                         size_t n_short,
                         double design_snr_db,
                         size_t *out,
                         size_t len);

// Spectrum distance `lambda` of the tree of length `n` after removing the
// given paths, as the reduced fraction `num / den`.
enum PsStatus ps_lambda(size_t n, const size_t *indices, size_t len, uint64_t *num, uint64_t *den);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARSHORT_H */
