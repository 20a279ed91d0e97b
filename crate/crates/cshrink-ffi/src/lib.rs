//! C ABI for the estimator core.
//!
//! Complex values cross the boundary as interleaved (re, im) f64 pairs.
//! Every function returns a [`CshrinkStatus`]; outputs go through pointers.
//! The only stateful object is the opaque fitter handle, which owns a fitted
//! shrinkage component.

use std::panic::{catch_unwind, AssertUnwindSafe};

use cshrink::frechet::{wfm_c, ConvexWeights};
use cshrink::manifold::{canonicalize_angle, dist_c, exp_map, log_map, LogCoord, PolarComplex};
use cshrink::shrinkage::{
    fit_sure_component, shrinkage_estimate, ComponentFit, HierarchicalModel, MixingMode,
    SampleSummary, SureFit,
};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CshrinkStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    NumericalError = 3,
}

fn run(f: impl FnOnce() -> CshrinkStatus) -> CshrinkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => CshrinkStatus::NumericalError,
    }
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn parse_points(re_im: &[f64]) -> Result<Vec<PolarComplex>, CshrinkStatus> {
    if re_im.len() % 2 != 0 {
        return Err(CshrinkStatus::InvalidArgument);
    }
    re_im
        .chunks_exact(2)
        .map(|c| PolarComplex::from_cartesian(c[0], c[1]).map_err(|_| CshrinkStatus::NumericalError))
        .collect()
}

/// Canonicalize an angle onto the principal branch (−π, π].
///
/// # Safety
/// `out` must point to writable memory for one f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_canonical_angle(raw: f64, out: *mut f64) -> CshrinkStatus {
    run(|| {
        if out.is_null() {
            return CshrinkStatus::NullArgument;
        }
        match canonicalize_angle(raw) {
            Ok(a) => {
                *out = a.theta();
                CshrinkStatus::Ok
            }
            Err(_) => CshrinkStatus::NumericalError,
        }
    })
}

/// Product-manifold distance between two complex numbers given in cartesian
/// form.
///
/// # Safety
/// `out` must point to writable memory for one f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_distance(
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
    out: *mut f64,
) -> CshrinkStatus {
    run(|| {
        if out.is_null() {
            return CshrinkStatus::NullArgument;
        }
        let (a, b) = match (
            PolarComplex::from_cartesian(a_re, a_im),
            PolarComplex::from_cartesian(b_re, b_im),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return CshrinkStatus::NumericalError,
        };
        *out = dist_c(&a, &b);
        CshrinkStatus::Ok
    })
}

/// Logarithm map: cartesian (re, im) to tangent coordinates (log r, √2·θ).
///
/// # Safety
/// `out_u` and `out_s` must point to writable memory for one f64 each.
#[no_mangle]
pub unsafe extern "C" fn cshrink_log_map(
    re: f64,
    im: f64,
    out_u: *mut f64,
    out_s: *mut f64,
) -> CshrinkStatus {
    run(|| {
        if out_u.is_null() || out_s.is_null() {
            return CshrinkStatus::NullArgument;
        }
        match PolarComplex::from_cartesian(re, im) {
            Ok(p) => {
                let l = log_map(&p);
                *out_u = l.u();
                *out_s = l.s();
                CshrinkStatus::Ok
            }
            Err(_) => CshrinkStatus::NumericalError,
        }
    })
}

/// Exponential map: tangent coordinates (log r, √2·θ) to cartesian (re, im).
///
/// # Safety
/// `out_re` and `out_im` must point to writable memory for one f64 each.
#[no_mangle]
pub unsafe extern "C" fn cshrink_exp_map(
    u: f64,
    s: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CshrinkStatus {
    run(|| {
        if out_re.is_null() || out_im.is_null() {
            return CshrinkStatus::NullArgument;
        }
        if !u.is_finite() || !s.is_finite() {
            return CshrinkStatus::InvalidArgument;
        }
        let p = exp_map(&LogCoord::from_us(u, s));
        let (re, im) = p.to_cartesian();
        *out_re = re;
        *out_im = im;
        CshrinkStatus::Ok
    })
}

/// Weighted Fréchet mean of `n` complex points with simplex weights.
///
/// # Safety
/// `points_re_im` must hold 2·n readable f64, `weights` n readable f64, and
/// the outputs one writable f64 each.
#[no_mangle]
pub unsafe extern "C" fn cshrink_wfm(
    points_re_im: *const f64,
    n: usize,
    weights: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CshrinkStatus {
    run(|| {
        if out_re.is_null() || out_im.is_null() {
            return CshrinkStatus::NullArgument;
        }
        let (points, weights) = match (slice_arg(points_re_im, 2 * n), slice_arg(weights, n)) {
            (Some(p), Some(w)) => (p, w),
            _ => return CshrinkStatus::NullArgument,
        };
        let pts = match parse_points(points) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let w = match ConvexWeights::new(weights.to_vec()) {
            Ok(w) => w,
            Err(_) => return CshrinkStatus::InvalidArgument,
        };
        match wfm_c(&pts, &w) {
            Ok(out) => {
                let (re, im) = out.point.to_cartesian();
                *out_re = re;
                *out_im = im;
                CshrinkStatus::Ok
            }
            Err(_) => CshrinkStatus::InvalidArgument,
        }
    })
}

/// Opaque fitter: holds the data variance, the sample count behind each
/// per-dimension mean, and the most recent component fit.
pub struct CshrinkFitter {
    v: f64,
    n_samples: usize,
    fit: Option<ComponentFit>,
}

/// Allocate a fitter. `v` must be positive and `n_samples` nonzero.
///
/// # Safety
/// `out` must point to writable memory for one pointer; the result must be
/// released with [`cshrink_fitter_free`].
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_new(
    v: f64,
    n_samples: usize,
    out: *mut *mut CshrinkFitter,
) -> CshrinkStatus {
    run(|| {
        if out.is_null() {
            return CshrinkStatus::NullArgument;
        }
        if !v.is_finite() || v <= 0.0 || n_samples == 0 {
            return CshrinkStatus::InvalidArgument;
        }
        let fitter = Box::new(CshrinkFitter { v, n_samples, fit: None });
        *out = Box::into_raw(fitter);
        CshrinkStatus::Ok
    })
}

/// Release a fitter allocated by [`cshrink_fitter_new`]. Null is a no-op.
///
/// # Safety
/// `fitter` must be null or a pointer returned by [`cshrink_fitter_new`]
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_free(fitter: *mut CshrinkFitter) {
    if !fitter.is_null() {
        drop(Box::from_raw(fitter));
    }
}

/// Fit the shrinkage prior to `p` per-dimension means given as (re, im)
/// pairs.
///
/// # Safety
/// `fitter` must be a live fitter; `xbar_re_im` must hold 2·p readable f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_fit(
    fitter: *mut CshrinkFitter,
    xbar_re_im: *const f64,
    p: usize,
) -> CshrinkStatus {
    run(|| {
        let Some(fitter) = fitter.as_mut() else {
            return CshrinkStatus::NullArgument;
        };
        let Some(xbar) = slice_arg(xbar_re_im, 2 * p) else {
            return CshrinkStatus::NullArgument;
        };
        if p == 0 {
            return CshrinkStatus::InvalidArgument;
        }
        let points = match parse_points(xbar) {
            Ok(pts) => pts,
            Err(status) => return status,
        };
        let summary = match SampleSummary::new(points, fitter.n_samples) {
            Ok(s) => s,
            Err(_) => return CshrinkStatus::InvalidArgument,
        };
        match fit_sure_component(&summary, fitter.v) {
            Ok(fit) => {
                fitter.fit = Some(fit);
                CshrinkStatus::Ok
            }
            Err(_) => CshrinkStatus::NumericalError,
        }
    })
}

/// Read the fitted prior mean as cartesian (re, im).
///
/// # Safety
/// `fitter` must be a live fitter; outputs must be writable f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_mu(
    fitter: *const CshrinkFitter,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CshrinkStatus {
    run(|| {
        let Some(fitter) = fitter.as_ref() else {
            return CshrinkStatus::NullArgument;
        };
        if out_re.is_null() || out_im.is_null() {
            return CshrinkStatus::NullArgument;
        }
        match &fitter.fit {
            Some(fit) => {
                let (re, im) = fit.mu_hat.to_cartesian();
                *out_re = re;
                *out_im = im;
                CshrinkStatus::Ok
            }
            None => CshrinkStatus::InvalidArgument,
        }
    })
}

/// Read the fitted prior variance.
///
/// # Safety
/// `fitter` must be a live fitter; `out` must be a writable f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_lambda(
    fitter: *const CshrinkFitter,
    out: *mut f64,
) -> CshrinkStatus {
    run(|| {
        let Some(fitter) = fitter.as_ref() else {
            return CshrinkStatus::NullArgument;
        };
        if out.is_null() {
            return CshrinkStatus::NullArgument;
        }
        match &fitter.fit {
            Some(fit) => {
                *out = fit.lambda_hat;
                CshrinkStatus::Ok
            }
            None => CshrinkStatus::InvalidArgument,
        }
    })
}

/// Read the achieved value of the risk objective at the fitted prior.
///
/// # Safety
/// `fitter` must be a live fitter; `out` must be a writable f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_sure_value(
    fitter: *const CshrinkFitter,
    out: *mut f64,
) -> CshrinkStatus {
    run(|| {
        let Some(fitter) = fitter.as_ref() else {
            return CshrinkStatus::NullArgument;
        };
        if out.is_null() {
            return CshrinkStatus::NullArgument;
        }
        match &fitter.fit {
            Some(fit) => {
                *out = fit.sure_value;
                CshrinkStatus::Ok
            }
            None => CshrinkStatus::InvalidArgument,
        }
    })
}

/// Shrink `p` per-dimension means toward the fitted prior; the output buffer
/// receives 2·p values, (re, im) per dimension.
///
/// # Safety
/// `fitter` must be a live, fitted fitter; `xbar_re_im` must hold 2·p
/// readable f64 and `out_re_im` 2·p writable f64.
#[no_mangle]
pub unsafe extern "C" fn cshrink_fitter_apply(
    fitter: *const CshrinkFitter,
    xbar_re_im: *const f64,
    p: usize,
    out_re_im: *mut f64,
) -> CshrinkStatus {
    run(|| {
        let Some(fitter) = fitter.as_ref() else {
            return CshrinkStatus::NullArgument;
        };
        let Some(fit) = &fitter.fit else {
            return CshrinkStatus::InvalidArgument;
        };
        if p == 0 {
            return CshrinkStatus::InvalidArgument;
        }
        let Some(xbar) = slice_arg(xbar_re_im, 2 * p) else {
            return CshrinkStatus::NullArgument;
        };
        if out_re_im.is_null() {
            return CshrinkStatus::NullArgument;
        }
        let points = match parse_points(xbar) {
            Ok(pts) => pts,
            Err(status) => return status,
        };
        let summary = match SampleSummary::new(points, fitter.n_samples) {
            Ok(s) => s,
            Err(_) => return CshrinkStatus::InvalidArgument,
        };
        let fits = SureFit { components: vec![fit.clone()] };
        let model = match fits.model(fitter.v, vec![1.0]) {
            Ok(m) => m,
            Err(_) => return CshrinkStatus::NumericalError,
        };
        match shrinkage_estimate(&summary, &model, &fits, MixingMode::Algebra) {
            Ok(est) => {
                let out = std::slice::from_raw_parts_mut(out_re_im, 2 * p);
                for (i, e) in est.iter().enumerate() {
                    let (re, im) = e.to_cartesian();
                    out[2 * i] = re;
                    out[2 * i + 1] = im;
                }
                CshrinkStatus::Ok
            }
            Err(_) => CshrinkStatus::NumericalError,
        }
    })
}

/// Stateless mixture estimator: shrink `p` means with `k` components given
/// simplex weights, component prior means (re, im) and variances.
///
/// # Safety
/// Pointer arguments must reference buffers of the documented lengths:
/// `weights` and `lambda` k values, `mu_re_im` 2·k, `xbar_re_im` and
/// `out_re_im` 2·p.
#[no_mangle]
pub unsafe extern "C" fn cshrink_mixture_estimate(
    v: f64,
    k: usize,
    weights: *const f64,
    mu_re_im: *const f64,
    lambda: *const f64,
    xbar_re_im: *const f64,
    p: usize,
    n_samples: usize,
    out_re_im: *mut f64,
) -> CshrinkStatus {
    run(|| {
        if k == 0 || p == 0 || n_samples == 0 {
            return CshrinkStatus::InvalidArgument;
        }
        let (Some(w), Some(mu), Some(lam), Some(xbar)) = (
            slice_arg(weights, k),
            slice_arg(mu_re_im, 2 * k),
            slice_arg(lambda, k),
            slice_arg(xbar_re_im, 2 * p),
        ) else {
            return CshrinkStatus::NullArgument;
        };
        if out_re_im.is_null() {
            return CshrinkStatus::NullArgument;
        }
        let mu_pts = match parse_points(mu) {
            Ok(pts) => pts,
            Err(status) => return status,
        };
        let xbar_pts = match parse_points(xbar) {
            Ok(pts) => pts,
            Err(status) => return status,
        };
        let model = match HierarchicalModel::new(v, w.to_vec(), mu_pts, lam.to_vec()) {
            Ok(m) => m,
            Err(_) => return CshrinkStatus::InvalidArgument,
        };
        let summary = match SampleSummary::new(xbar_pts, n_samples) {
            Ok(s) => s,
            Err(_) => return CshrinkStatus::InvalidArgument,
        };
        let fits = SureFit {
            components: model
                .mu()
                .iter()
                .zip(model.lambda())
                .map(|(m, l)| ComponentFit {
                    mu_hat: *m,
                    lambda_hat: *l,
                    sure_value: 0.0,
                    floored: false,
                    saturated: false,
                    low_dim_warning: false,
                    probe_trace: vec![],
                    golden_iterations: 0,
                })
                .collect(),
        };
        match shrinkage_estimate(&summary, &model, &fits, MixingMode::Algebra) {
            Ok(est) => {
                let out = std::slice::from_raw_parts_mut(out_re_im, 2 * p);
                for (i, e) in est.iter().enumerate() {
                    let (re, im) = e.to_cartesian();
                    out[2 * i] = re;
                    out[2 * i + 1] = im;
                }
                CshrinkStatus::Ok
            }
            Err(_) => CshrinkStatus::NumericalError,
        }
    })
}
