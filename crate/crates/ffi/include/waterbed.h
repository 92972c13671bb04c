#ifndef WATERBED_H
#define WATERBED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WbStatus {
  WB_STATUS_OK = 0,
  WB_STATUS_NULL_ARGUMENT = 1,
  WB_STATUS_INVALID_INPUT = 2,
  WB_STATUS_NUMERICAL = 3,
  WB_STATUS_NON_CONVERGENT = 4,
  WB_STATUS_INTERNAL = 5,
} WbStatus;

typedef enum WbVerdict {
  WB_VERDICT_OPEN_LOOP_STABLE = 0,
  WB_VERDICT_OPEN_LOOP_UNSTABLE = 1,
  WB_VERDICT_CLOSED_LOOP_UNSTABLE = 2,
} WbVerdict;

/**
 * Result of `wb_verify`.
 */
typedef struct WbReport WbReport;

/**
 * A loop gain, SISO or square MIMO.
 */
typedef struct WbSystem WbSystem;

/**
 * Integral values from a report. Missing values are NaN.
 */
typedef struct WbIntegrals {
  double numeric_s;
  double analytic_s;
  double discrepancy_s;
  double numeric_t;
  double analytic_t;
  double discrepancy_t;
} WbIntegrals;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * SISO loop gain from ascending-degree real coefficients.
 *
 * # Safety
 * `num` and `den` must point to `num_len` and `den_len` readable doubles
 * (either may be null when its length is 0). `out` must be writable.
 */
enum WbStatus wb_system_from_ratio(const double *num,
                                   size_t num_len,
                                   const double *den,
                                   size_t den_len,
                                   struct WbSystem **out);

/**
 * SISO loop gain `k prod(z - z_i) / prod(z - p_i)`.
 *
 * # Safety
 * `zeros` and `poles` must point to `2 * n_zeros` and `2 * n_poles`
 * readable doubles. `out` must be writable.
 */
enum WbStatus wb_system_from_zpk(const double *zeros,
                                 size_t n_zeros,
                                 const double *poles,
                                 size_t n_poles,
                                 double gain_re,
                                 double gain_im,
                                 struct WbSystem **out);

/**
 * Any loop gain from the JSON system-file format.
 *
 * # Safety
 * `text` must be a NUL-terminated UTF-8 string. `out` must be writable.
 */
enum WbStatus wb_system_from_json(const char *text, struct WbSystem **out);

/**
 * Number of loop channels (1 for SISO).
 *
 * # Safety
 * `system` must be null or a live handle.
 */
size_t wb_system_size(const struct WbSystem *system);

/**
 * # Safety
 * `system` must be null or a handle not yet freed.
 */
void wb_system_free(struct WbSystem *system);

/**
 * Sensitivity and complementary integrals with their predictions.
 * `quad_tol <= 0` selects the default quadrature tolerance.
 *
 * # Safety
 * `system` must be a live handle and `out` writable.
 */
enum WbStatus wb_verify(const struct WbSystem *system, double quad_tol, struct WbReport **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void wb_report_free(struct WbReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum WbStatus wb_report_verdict(const struct WbReport *report, enum WbVerdict *out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum WbStatus wb_report_integrals(const struct WbReport *report, struct WbIntegrals *out);

/**
 * Writes 1 when every check passes at `tol`, else 0.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum WbStatus wb_report_passes(const struct WbReport *report, double tol, int32_t *out);

/**
 * Report as JSON. Release the string with `wb_string_free`.
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum WbStatus wb_report_to_json(const struct WbReport *report, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void wb_string_free(char *s);

/**
 * Closed form of the integral of `ln(1 - 2a cos x + a^2)` over a period.
 */
double wb_identity_integral(double a);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *wb_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WATERBED_H */
