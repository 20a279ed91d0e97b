#ifndef CSHRINK_H
#define CSHRINK_H

/* Generated by cbindgen from the cshrink-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum CshrinkStatus {
  CSHRINK_STATUS_OK = 0,
  CSHRINK_STATUS_NULL_ARGUMENT = 1,
  CSHRINK_STATUS_INVALID_ARGUMENT = 2,
  CSHRINK_STATUS_NUMERICAL_ERROR = 3,
} CshrinkStatus;

/**
 * Opaque fitter: holds the data variance, the sample count behind each
 * per-dimension mean, and the most recent component fit.
 */
typedef struct CshrinkFitter CshrinkFitter;

/**
 * Canonicalize an angle onto the principal branch (−π, π].
 *
 * # Safety
 * `out` must point to writable memory for one f64.
 */
enum CshrinkStatus cshrink_canonical_angle(double raw, double *out);

/**
 * Product-manifold distance between two complex numbers given in cartesian
 * form.
 *
 * # Safety
 * `out` must point to writable memory for one f64.
 */
enum CshrinkStatus cshrink_distance(double a_re,
                                    double a_im,
                                    double b_re,
                                    double b_im,
                                    double *out);

/**
 * Logarithm map: cartesian (re, im) to tangent coordinates (log r, √2·θ).
 *
 * # Safety
 * `out_u` and `out_s` must point to writable memory for one f64 each.
 */
enum CshrinkStatus cshrink_log_map(double re, double im, double *out_u, double *out_s);

/**
 * Exponential map: tangent coordinates (log r, √2·θ) to cartesian (re, im).
 *
 * # Safety
 * `out_re` and `out_im` must point to writable memory for one f64 each.
 */
enum CshrinkStatus cshrink_exp_map(double u, double s, double *out_re, double *out_im);

/**
 * Weighted Fréchet mean of `n` complex points with simplex weights.
 *
 * # Safety
 * `points_re_im` must hold 2·n readable f64, `weights` n readable f64, and
 * the outputs one writable f64 each.
 */
enum CshrinkStatus cshrink_wfm(const double *points_re_im,
                               size_t n,
                               const double *weights,
                               double *out_re,
                               double *out_im);

/**
 * Allocate a fitter. `v` must be positive and `n_samples` nonzero.
 *
 * # Safety
 * `out` must point to writable memory for one pointer; the result must be
 * released with [`cshrink_fitter_free`].
 */
enum CshrinkStatus cshrink_fitter_new(double v, size_t n_samples, struct CshrinkFitter **out);

/**
 * Release a fitter allocated by [`cshrink_fitter_new`]. Null is a no-op.
 *
 * # Safety
 * `fitter` must be null or a pointer returned by [`cshrink_fitter_new`]
 * that has not been freed yet.
 */
void cshrink_fitter_free(struct CshrinkFitter *fitter);

/**
 * Fit the shrinkage prior to `p` per-dimension means given as (re, im)
 * pairs.
 *
 * # Safety
 * `fitter` must be a live fitter; `xbar_re_im` must hold 2·p readable f64.
 */
enum CshrinkStatus cshrink_fitter_fit(struct CshrinkFitter *fitter,
                                      const double *xbar_re_im,
                                      size_t p);

/**
 * Read the fitted prior mean as cartesian (re, im).
 *
 * # Safety
 * `fitter` must be a live fitter; outputs must be writable f64.
 */
enum CshrinkStatus cshrink_fitter_mu(const struct CshrinkFitter *fitter,
                                     double *out_re,
                                     double *out_im);

/**
 * Read the fitted prior variance.
 *
 * # Safety
 * `fitter` must be a live fitter; `out` must be a writable f64.
 */
enum CshrinkStatus cshrink_fitter_lambda(const struct CshrinkFitter *fitter, double *out);

/**
 * Read the achieved value of the risk objective at the fitted prior.
 *
 * # Safety
 * `fitter` must be a live fitter; `out` must be a writable f64.
 */
enum CshrinkStatus cshrink_fitter_sure_value(const struct CshrinkFitter *fitter, double *out);

/**
 * Shrink `p` per-dimension means toward the fitted prior; the output buffer
 * receives 2·p values, (re, im) per dimension.
 *
 * # Safety
 * `fitter` must be a live, fitted fitter; `xbar_re_im` must hold 2·p
 * readable f64 and `out_re_im` 2·p writable f64.
 */
enum CshrinkStatus cshrink_fitter_apply(const struct CshrinkFitter *fitter,
                                        const double *xbar_re_im,
                                        size_t p,
                                        double *out_re_im);

/**
 * Stateless mixture estimator: shrink `p` means with `k` components given
 * simplex weights, component prior means (re, im) and variances.
 *
 * # Safety
 * Pointer arguments must reference buffers of the documented lengths:
 * `weights` and `lambda` k values, `mu_re_im` 2·k, `xbar_re_im` and
 * `out_re_im` 2·p.
 */
enum CshrinkStatus cshrink_mixture_estimate(double v,
                                            size_t k,
                                            const double *weights,
                                            const double *mu_re_im,
                                            const double *lambda,
                                            const double *xbar_re_im,
                                            size_t p,
                                            size_t n_samples,
                                            double *out_re_im);

#endif /* CSHRINK_H */
