#ifndef SSK_LAB_H
#define SSK_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SskStatus {
  SSK_STATUS_OK = 0,
  SSK_STATUS_INVALID_ARGUMENT = 1,
  SSK_STATUS_NUMERIC_FAILURE = 2,
  SSK_STATUS_DEGENERATE_SPECTRUM = 3,
  SSK_STATUS_BRANCH_CUT = 4,
  SSK_STATUS_OUT_OF_REGIME = 5,
  SSK_STATUS_PRECONDITION_VIOLATED = 6,
  SSK_STATUS_INFEASIBLE_REGIME = 7,
  SSK_STATUS_ALL_TRIALS_FAILED = 8,
  SSK_STATUS_CONFIG = 9,
  SSK_STATUS_IO = 10,
  SSK_STATUS_NULL_POINTER = 11,
  SSK_STATUS_PANIC = 12,
} SskStatus;

typedef enum SskEnsemble {
  SSK_ENSEMBLE_GOE_DENSE = 0,
  SSK_ENSEMBLE_GOE_ZERO_DIAG = 1,
  SSK_ENSEMBLE_GUE_DENSE = 2,
  SSK_ENSEMBLE_GOE_TRIDIAG = 3,
  SSK_ENSEMBLE_GUE_TRIDIAG = 4,
} SskEnsemble;

/**
 * Integrand shapes `e^{az} z^k (z+b)^p` of the keyhole identities.
 */
typedef enum SskKeyhole {
  SSK_KEYHOLE_INV_SQRT = 0,
  SSK_KEYHOLE_SQRT = 1,
  SSK_KEYHOLE_POW32 = 2,
  SSK_KEYHOLE_INV_SQRT_Z2 = 3,
  SSK_KEYHOLE_INV_POW32 = 4,
  SSK_KEYHOLE_INV_POW32_Z2 = 5,
  SSK_KEYHOLE_INV_POW52 = 6,
  SSK_KEYHOLE_INV_POW52_Z2 = 7,
} SskKeyhole;

/**
 * Opaque eigenvalue sample.
 */
typedef struct SskSpectrum SskSpectrum;

/**
 * Overlap moments. Fields that a method does not produce are NaN.
 */
typedef struct SskMoments {
  double m2;
  double m4;
  double central4;
  double err;
} SskMoments;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *ssk_last_error_message(void);

/**
 * Samples the spectrum of an `n`-by-`n` matrix from `ensemble`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum SskStatus ssk_spectrum_sample(enum SskEnsemble ensemble,
                                   size_t n,
                                   uint64_t seed,
                                   struct SskSpectrum **out);

/**
 * Wraps caller-supplied eigenvalues (any order) in a spectrum handle.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be writable.
 */
enum SskStatus ssk_spectrum_from_eigenvalues(const double *values,
                                             size_t len,
                                             struct SskSpectrum **out);

/**
 * Number of eigenvalues; 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t ssk_spectrum_len(const struct SskSpectrum *h);

/**
 * Copies the eigenvalues, largest first, into `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` must hold `len` writable doubles.
 */
enum SskStatus ssk_spectrum_copy_eigenvalues(const struct SskSpectrum *h, double *buf, size_t len);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void ssk_spectrum_free(struct SskSpectrum *h);

/**
 * Second and fourth overlap moments by contour quadrature.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SskStatus ssk_overlap_contour(const struct SskSpectrum *h,
                                   double beta,
                                   struct SskMoments *out);

/**
 * Low-temperature expansion of the overlap moments, without the event gate.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SskStatus ssk_overlap_expansion(const struct SskSpectrum *h,
                                     double beta,
                                     struct SskMoments *out);

/**
 * Full-spectrum edge statistic of a spectrum.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SskStatus ssk_xi_full(const struct SskSpectrum *h, double *out);

/**
 * Height of the steepest-descent contour above `E <= 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SskStatus ssk_eta_of_e(double e, double beta, size_t n, double *out);

/**
 * Closed-form keyhole integral; the value is `re + i im`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum SskStatus ssk_keyhole_closed_form(enum SskKeyhole kind,
                                       double a,
                                       double b,
                                       double *re,
                                       double *im);

/**
 * Runs an experiment described by a TOML configuration and returns its
 * trial records as JSON lines. Free the result with [`ssk_string_free`].
 *
 * # Safety
 * `config_toml` must be a nul-terminated string and `out` writable.
 */
enum SskStatus ssk_run_config(const char *config_toml, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ssk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSK_LAB_H */
