#ifndef HOM_FINGERPRINT_H
#define HOM_FINGERPRINT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum HfpStatus {
  HFP_STATUS_OK = 0,
  HFP_STATUS_NULL_POINTER = 1,
  // A numeric argument lies outside its domain.
  HFP_STATUS_DOMAIN = 2,
  HFP_STATUS_INVALID_ARGUMENT = 3,
  HFP_STATUS_LENGTH_MISMATCH = 4,
  // Code construction or certification failed.
  HFP_STATUS_CODE = 5,
  // A search or bound has no solution in range.
  HFP_STATUS_NO_SOLUTION = 6,
  HFP_STATUS_BUFFER_TOO_SMALL = 7,
  HFP_STATUS_PANIC = 8,
} HfpStatus;

typedef enum HfpDecision {
  HFP_DECISION_DIFFERENT = 0,
  HFP_DECISION_EQUAL = 1,
} HfpDecision;

typedef enum HfpConvention {
  HFP_CONVENTION_CONDITIONAL_MISIDENTIFICATION = 0,
  HFP_CONVENTION_AVERAGE_ERROR = 1,
} HfpConvention;

// Opaque binary linear code.
typedef struct HfpLinearCode HfpLinearCode;

// Opaque source/channel/detector parameters.
typedef struct HfpSourceParams HfpSourceParams;

typedef struct HfpHypothesisPair {
  double q_d;
  double q_e;
  double p2;
} HfpHypothesisPair;

typedef struct HfpChernoffResult {
  double c;
  double alpha_star;
  double objective_min;
} HfpChernoffResult;

typedef struct HfpEventTally {
  uint64_t n_runs;
  uint64_t n_coincidence;
  uint64_t n_double;
  uint64_t n_two_click;
} HfpEventTally;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// NUL-terminated message for the last failure on this thread; empty if
// none. Valid until the next failing call on the same thread.
const char *hfp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *hfp_version(void);

// # Safety
// `out` must be valid for a pointer write. Free the handle with
// [`hfp_source_params_free`].
enum HfpStatus hfp_source_params_new(double eta_nbar,
                                     double g2,
                                     double dark_ratio,
                                     double w,
                                     struct HfpSourceParams **out);

// # Safety
// `params` must be null or a handle from [`hfp_source_params_new`] that has
// not been freed.
void hfp_source_params_free(struct HfpSourceParams *params);

// Number of validity warnings (parameters outside the leading-order regime).
//
// # Safety
// `params` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_source_params_warning_count(const struct HfpSourceParams *params, uint32_t *out);

// # Safety
// `params` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_two_click_probability(const struct HfpSourceParams *params, double *out);

// # Safety
// `params` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_coincidence_fraction(const struct HfpSourceParams *params,
                                        double v,
                                        double *out);

// # Safety
// `params` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_hypothesis_pair(const struct HfpSourceParams *params,
                                   double delta_min,
                                   struct HfpHypothesisPair *out);

// # Safety
// `params` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_rescaled_chernoff_zeta(const struct HfpSourceParams *params,
                                          double delta_min,
                                          double *out);

// # Safety
// `hp` must point to a readable pair; `out` valid for writes.
enum HfpStatus hfp_exact_error_probability(uint64_t n2,
                                           const struct HfpHypothesisPair *hp,
                                           double *out);

// # Safety
// `hp` must point to a readable pair; `out` valid for writes.
enum HfpStatus hfp_decide(uint64_t n_c,
                          uint64_t n2,
                          const struct HfpHypothesisPair *hp,
                          enum HfpDecision *out);

// Chernoff information between two distributions of length `len`.
//
// # Safety
// `p_d` and `p_e` must each point to `len` readable doubles; `out` valid
// for writes.
enum HfpStatus hfp_chernoff_information(const double *p_d,
                                        const double *p_e,
                                        size_t len,
                                        struct HfpChernoffResult *out);

// # Safety
// `hp` must point to a readable pair; `out` valid for writes.
enum HfpStatus hfp_two_click_chernoff(const struct HfpHypothesisPair *hp,
                                      struct HfpChernoffResult *out);

// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_asymptotic_error(double n_runs, double eta_nbar, double zeta, double *out);

// `1 − H₂(δ)`.
//
// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_gv_rate(double delta_min, double *out);

// Rate bound of the extended code as a function of its distance.
//
// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_modified_gv_rate(double delta_ext, double *out);

// Extended-code distance matching a base-code distance.
//
// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_map_coherent_to_twophoton_distance(double delta_coh, double *out);

// Codeword-length overhead `M/m`.
//
// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_overhead_ratio(double delta_coh, double *out);

// Draws and certifies a random `m × n` code.
//
// # Safety
// `out` must be valid for a pointer write. Free with
// [`hfp_linear_code_free`].
enum HfpStatus hfp_linear_code_random(size_t n,
                                      size_t m,
                                      uint64_t seed,
                                      struct HfpLinearCode **out);

// Parses `{"n", "m", "generator", "certified_min_distance"?}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` valid for a pointer write.
enum HfpStatus hfp_linear_code_from_json(const char *json, struct HfpLinearCode **out);

// Writes the code's JSON and a NUL terminator into `buf`. `out_len`
// receives the length without the terminator; if `capacity` is too small
// nothing is written to `buf` and [`HfpStatus::BufferTooSmall`] is returned.
//
// # Safety
// `code` must be a live handle; `buf` writable for `capacity` bytes (or
// null when `capacity` is 0); `out_len` valid for writes.
enum HfpStatus hfp_linear_code_to_json(const struct HfpLinearCode *code,
                                       char *buf,
                                       size_t capacity,
                                       size_t *out_len);

// # Safety
// `code` must be null or a live handle.
void hfp_linear_code_free(struct HfpLinearCode *code);

// Writes `n` and `m`.
//
// # Safety
// `code` must be a live handle; `n` and `m` valid for writes.
enum HfpStatus hfp_linear_code_dims(const struct HfpLinearCode *code, size_t *n, size_t *m);

// Exhaustively certified minimum distance, computing it if absent.
//
// # Safety
// `code` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_linear_code_min_distance(const struct HfpLinearCode *code, uint32_t *out);

// Encodes `input_len` bits (one byte each, 0 or 1) into `output`, which
// must hold `output_len >= m` bytes.
//
// # Safety
// `code` must be a live handle; `input` readable for `input_len` bytes;
// `output` writable for `output_len` bytes.
enum HfpStatus hfp_linear_code_encode(const struct HfpLinearCode *code,
                                      const uint8_t *input,
                                      size_t input_len,
                                      uint8_t *output,
                                      size_t output_len);

// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_classical_bound(uint64_t n, double p_err, double *out);

// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_two_photon_information(uint64_t n2, uint64_t m_seq, double *out);

// # Safety
// `out` must be valid for writes.
enum HfpStatus hfp_coherent_information(double nbar, uint64_t m_seq, double *out);

// Crossover lengths for an [`HfpConvention`] value; `out_coherent` receives 0 when the coherent-state
// scheme never crosses in the search range.
//
// # Safety
// `out_two_photon` and `out_coherent` must be valid for writes.
enum HfpStatus hfp_crossover_length(double p_err,
                                    double delta_coh,
                                    uint32_t convention,
                                    uint64_t *out_two_photon,
                                    uint64_t *out_coherent);

// Seeded Monte Carlo batch; identical for identical arguments on every
// platform and thread count.
//
// # Safety
// `params` must be a live handle; `out` valid for writes.
enum HfpStatus hfp_simulate_batch(const struct HfpSourceParams *params,
                                  double v,
                                  uint64_t n_runs,
                                  uint64_t seed,
                                  struct HfpEventTally *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOM_FINGERPRINT_H */
