#ifndef ORBITPREC_H
#define ORBITPREC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum OrbitprecForm {
  ORBITPREC_FORM_FORM1 = 0,
  ORBITPREC_FORM_FORM2 = 1,
  ORBITPREC_FORM_FORM3 = 2,
  ORBITPREC_FORM_MEAN_VALUE = 3,
  ORBITPREC_FORM_RUNNING_ERROR = 4,
} OrbitprecForm;

typedef enum OrbitprecStatus {
  ORBITPREC_STATUS_OK = 0,
  ORBITPREC_STATUS_NULL_POINTER = 1,
  ORBITPREC_STATUS_INVALID_ARGUMENT = 2,
  ORBITPREC_STATUS_OUTSIDE_DOMAIN = 3,
  ORBITPREC_STATUS_NO_HALT_WITHIN_CAP = 4,
  ORBITPREC_STATUS_INTERNAL = 5,
} OrbitprecStatus;

/**
 * A logistic map `x -> mu x (1 - x)` with its evaluation form.
 */
typedef struct OrbitprecSystem OrbitprecSystem;

/**
 * Result of a minimal-precision search.
 */
typedef struct OrbitprecReport {
  /**
   * Smallest working precision in bits.
   */
  uint32_t m_min;
  /**
   * Bits lost per step; NaN when `n == 0`.
   */
  double sigma_est;
  /**
   * Last orbit value and its error bound, rounded to double.
   */
  double final_value;
  double final_error;
} OrbitprecReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a system with `mu = mu_num / mu_den`, `0 < mu <= 4`.
 *
 * # Safety
 * `out` must point to writable storage for one handle.
 */
enum OrbitprecStatus orbitprec_system_new(int64_t mu_num,
                                          int64_t mu_den,
                                          enum OrbitprecForm form,
                                          struct OrbitprecSystem **out);

/**
 * Like [`orbitprec_system_new`] with `mu` given as text, e.g. "3.75" or "15/4".
 *
 * # Safety
 * `mu` must be a NUL-terminated string and `out` writable storage for one handle.
 */
enum OrbitprecStatus orbitprec_system_new_str(const char *mu,
                                              enum OrbitprecForm form,
                                              struct OrbitprecSystem **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sys` must come from `orbitprec_system_new*` and not be used afterwards.
 */
void orbitprec_system_free(struct OrbitprecSystem *sys);

/**
 * Smallest precision at which the orbit of `x0_num / x0_den` of length `n`
 * holds `p` digits at every point, searched up to `m_cap` bits. `absolute`
 * selects the absolute error criterion.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum OrbitprecStatus orbitprec_find_min_precision(const struct OrbitprecSystem *sys,
                                                  int64_t x0_num,
                                                  int64_t x0_den,
                                                  size_t n,
                                                  int32_t p,
                                                  bool absolute,
                                                  uint32_t m_cap,
                                                  struct OrbitprecReport *out);

/**
 * Lyapunov exponent estimate along a validated orbit of `x0_num / x0_den`.
 * `half_width` bounds the rounding effect on `value`.
 *
 * # Safety
 * `sys` must be a live handle; `value` and `half_width` writable.
 */
enum OrbitprecStatus orbitprec_lyapunov(const struct OrbitprecSystem *sys,
                                        int64_t x0_num,
                                        int64_t x0_den,
                                        size_t iterations,
                                        size_t transient,
                                        double *value,
                                        double *half_width);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *orbitprec_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBITPREC_H */
