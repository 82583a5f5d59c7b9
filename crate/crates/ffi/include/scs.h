#ifndef SCS_H
#define SCS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum ScsStatus {
  SCS_STATUS_OK = 0,
  SCS_STATUS_NULL_POINTER = 1,
  SCS_STATUS_INVALID_ARGUMENT = 2,
  SCS_STATUS_MALFORMED_INPUT = 3,
  SCS_STATUS_PRECONDITION_FAILED = 4,
  // Search stopped at its node budget without a decision.
  SCS_STATUS_BUDGET_HIT = 5,
  // Search proved that the requested CFR does not exist.
  SCS_STATUS_EXHAUSTED = 6,
  SCS_STATUS_BUFFER_TOO_SMALL = 7,
  SCS_STATUS_IO = 8,
  SCS_STATUS_INTERNAL = 9,
} ScsStatus;

// A circular Florentine rectangle.
typedef struct ScsCfr ScsCfr;

// A family of K sets of M time-domain sequences.
typedef struct ScsFamily ScsFamily;

// Correlation maxima over a shift window.
typedef struct ScsSummary {
  // Largest per-set maximum (auto sidelobes and intra-set cross values).
  double theta_a;
  // Largest cross value between sequences of different sets.
  double theta_c;
  double theta_max;
  // Smallest ZCZ width over the sets.
  size_t zcz_width;
} ScsSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. Empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *scs_last_error_message(void);

// Release a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and must not be used afterwards.
void scs_string_free(char *s);

// Multiplication table of Z_p without its zero row ((p−1)×p).
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum ScsStatus scs_cfr_from_prime(size_t p, struct ScsCfr **out);

// Backtracking search for a `rows`×`n` CFR. Returns `SCS_STATUS_OK` with a
// handle in `out`, `SCS_STATUS_BUDGET_HIT` or `SCS_STATUS_EXHAUSTED`.
// `nodes` (optional) receives the number of search nodes.
//
// # Safety
// `out` must be valid; `nodes` may be null.
enum ScsStatus scs_cfr_search(size_t n,
                              size_t rows,
                              uint64_t budget,
                              struct ScsCfr **out,
                              uint64_t *nodes);

// Parse the text format: a header line "N r" followed by r rows.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be valid.
enum ScsStatus scs_cfr_from_text(const char *text, struct ScsCfr **out);

// Check the CFR axioms on a row-major `rows`×`n` matrix. `ok` receives
// the verdict; malformed input (ragged or out-of-range) is an error.
//
// # Safety
// `data` must point to `rows * n` values; `ok` must be valid.
enum ScsStatus scs_cfr_verify(const size_t *data, size_t rows, size_t n, bool *ok);

// N, or 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t scs_cfr_order(const struct ScsCfr *c);

// Number of rows, or 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t scs_cfr_num_rows(const struct ScsCfr *c);

// Copy the matrix row-major into `buf` (capacity `cap` values).
//
// # Safety
// `c` must be a live handle; `buf` must hold `cap` values.
enum ScsStatus scs_cfr_rows(const struct ScsCfr *c, size_t *buf, size_t cap);

// Release a CFR handle. Null is ignored.
//
// # Safety
// `c` must be null or a handle not yet freed.
void scs_cfr_free(struct ScsCfr *c);

// Time-domain construction: one sequence of length N(N+1) per CFR row.
//
// # Safety
// `c` must be a live handle; `out` must be valid.
enum ScsStatus scs_family_c1(const struct ScsCfr *c, struct ScsFamily **out);

// One inserted zero column at `s0` ∈ Z_{N+1}.
//
// # Safety
// `c` must be a live handle; `out` must be valid.
enum ScsStatus scs_family_c2(const struct ScsCfr *c, size_t s0, struct ScsFamily **out);

// Zero columns at the `len` indices in `insert`.
//
// # Safety
// `c` must be a live handle; `insert` must hold `len` values.
enum ScsStatus scs_family_c3(const struct ScsCfr *c,
                             const size_t *insert,
                             size_t len,
                             struct ScsFamily **out);

// ZCZ sets built with the order-N DFT matrix. `k` = 0 uses every CFR row.
//
// # Safety
// `c` must be a live handle; `insert` must hold `len` values.
enum ScsStatus scs_family_c4(const struct ScsCfr *c,
                             const size_t *insert,
                             size_t len,
                             size_t k,
                             struct ScsFamily **out);

// Load a family from its JSON text.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid.
enum ScsStatus scs_family_from_json(const char *json, struct ScsFamily **out);

// L, K and M. Any out-pointer may be null.
//
// # Safety
// `f` must be a live handle.
enum ScsStatus scs_family_shape(const struct ScsFamily *f,
                                size_t *length,
                                size_t *num_sets,
                                size_t *set_size);

// Forbidden carriers, ascending. `len` always receives |Ω|; the copy
// happens only when `cap` is large enough.
//
// # Safety
// `f` must be a live handle; `buf` must hold `cap` values; `len` valid.
enum ScsStatus scs_family_omega(const struct ScsFamily *f, size_t *buf, size_t cap, size_t *len);

// Copy member `index` of set `set` as interleaved (re, im) pairs into
// `buf`, which must hold `cap` doubles (at least 2L).
//
// # Safety
// `f` must be a live handle; `buf` must hold `cap` doubles.
enum ScsStatus scs_family_sequence(const struct ScsFamily *f,
                                   size_t set,
                                   size_t index,
                                   double *buf,
                                   size_t cap);

// Correlation maxima over shifts 0 ≤ τ < `window` (0 means the full
// period). Zero tests use `zero_tol`, or the default when it is ≤ 0.
//
// # Safety
// `f` must be a live handle; `summary` must be valid.
enum ScsStatus scs_family_summary(const struct ScsFamily *f,
                                  size_t window,
                                  double zero_tol,
                                  struct ScsSummary *summary);

// Serialize to the family JSON format. Free the result with
// [`scs_string_free`].
//
// # Safety
// `f` must be a live handle; `json` must be valid.
enum ScsStatus scs_family_to_json(const struct ScsFamily *f, char **json);

// Release a family handle. Null is ignored.
//
// # Safety
// `f` must be null or a handle not yet freed.
void scs_family_free(struct ScsFamily *f);

// L·√(((M−1)L+n)/((L−n)(ML−1))).
//
// # Safety
// `out` must be valid.
enum ScsStatus scs_liu_bound(size_t m, size_t l, size_t n, double *out);

// Autocorrelation and cross-correlation floors under uniform power.
//
// # Safety
// `theta_a` and `theta_c` must be valid.
enum ScsStatus scs_improved_bounds(size_t l, size_t n, double *theta_a, double *theta_c);

// L/√(L−n).
//
// # Safety
// `out` must be valid.
enum ScsStatus scs_interset_bound(size_t l, size_t n, double *out);

// θ_max divided by the Liu bound.
//
// # Safety
// `out` must be valid.
enum ScsStatus scs_optimality_factor(double theta_max, size_t m, size_t l, size_t n, double *out);

// Closed-form η of the time-domain family from an F×N CFR.
//
// # Safety
// `out` must be valid.
enum ScsStatus scs_cfr_family_eta(size_t order, size_t rows, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCS_H */
