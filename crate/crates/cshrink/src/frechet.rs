//! Fréchet means on P1, SO(2), and their product under the Log-Euclidean metric.
//!
//! The P1 factor is flat, so the weighted mean of logs is the exact minimizer.
//! On the circle the squared wrapped distance is piecewise quadratic; the
//! global minimizer is found by evaluating the closed-form candidate in each
//! of the n wrap branches (shift each sorted prefix across the ±π cut) and
//! keeping the argmin. Window sizes here are small, so exactness beats an
//! iterative Karcher descent with convergence tuning.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::manifold::{AngleSO2, PolarComplex, ScaleP1};

const TWO_PI: f64 = 2.0 * PI;

/// Candidates closer than this (wrapped) are the same minimizer reached via
/// different cuts; a degenerate tie needs two separated clusters.
const TIE_SEPARATION: f64 = 1e-6;
const TIE_REL_TOL: f64 = 1e-12;

/// Convex combination weights: nonnegative, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexWeights {
    alpha: Vec<f64>,
}

impl ConvexWeights {
    /// Validate an explicit weight vector.
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::usage("weights must be nonempty"));
        }
        if alpha.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::usage("weights must be finite and nonnegative"));
        }
        let sum: f64 = alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::usage(format!("weights must sum to 1, got {sum}")));
        }
        Ok(ConvexWeights { alpha })
    }

    /// Realize simplex weights from free parameters via normalized exponentials.
    pub fn from_free(free: &[f64]) -> Result<Self> {
        if free.is_empty() {
            return Err(Error::usage("free weight vector must be nonempty"));
        }
        let m = free.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(Error::numerical("non-finite free weights"));
        }
        let exps: Vec<f64> = free.iter().map(|x| (x - m).exp()).collect();
        let sum: f64 = exps.iter().sum();
        Ok(ConvexWeights { alpha: exps.iter().map(|e| e / sum).collect() })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("weights must be nonempty"));
        }
        Ok(ConvexWeights { alpha: vec![1.0 / n as f64; n] })
    }

    pub fn one_hot(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::usage(format!("one-hot index {index} out of range {n}")));
        }
        let mut alpha = vec![0.0; n];
        alpha[index] = 1.0;
        Ok(ConvexWeights { alpha })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Result of a circle Fréchet mean; `degenerate` marks a resolved tie between
/// distinct global minimizers (antipodal configurations).
#[derive(Clone, Copy, Debug)]
pub struct FmSo2 {
    pub angle: AngleSO2,
    pub degenerate: bool,
}

/// Result of the product-manifold weighted Fréchet mean.
#[derive(Clone, Copy, Debug)]
pub struct WfmC {
    pub point: PolarComplex,
    pub degenerate: bool,
}

fn check_lengths(n_points: usize, weights: &ConvexWeights) -> Result<()> {
    if n_points == 0 {
        return Err(Error::usage("point list must be nonempty"));
    }
    if n_points != weights.len() {
        return Err(Error::usage(format!(
            "length mismatch: {n_points} points vs {} weights",
            weights.len()
        )));
    }
    Ok(())
}

/// Weighted Fréchet mean on P1: exp of the weighted arithmetic mean of logs.
pub fn fm_p1(points: &[ScaleP1], weights: &ConvexWeights) -> Result<ScaleP1> {
    check_lengths(points.len(), weights)?;
    let mut acc = 0.0;
    for (p, w) in points.iter().zip(weights.as_slice()) {
        acc += w * p.log_r();
    }
    Ok(ScaleP1::from_log(acc))
}

/// Weighted objective Σ αᵢ · wrapdiff(c, θᵢ)² in plain θ units (the √2 metric
/// scaling multiplies the objective by 2 and does not move the argmin).
fn circle_objective(c: f64, sorted: &[(f64, f64)], pw: &Prefix) -> f64 {
    // Points with θ < c − π wrap up by 2π; points with θ > c + π wrap down.
    let lo = partition_lt(sorted, c - PI);
    let hi = partition_le(sorted, c + PI);
    let n = sorted.len();

    // Σ w (c − θ − 2π)² over [0, lo)
    let a = pw.seg(0, lo);
    let d1 = c - TWO_PI;
    let t1 = a.w * d1 * d1 - 2.0 * d1 * a.wt + a.wt2;
    // Σ w (c − θ)² over [lo, hi)
    let b = pw.seg(lo, hi);
    let t2 = b.w * c * c - 2.0 * c * b.wt + b.wt2;
    // Σ w (c − θ + 2π)² over [hi, n)
    let cseg = pw.seg(hi, n);
    let d3 = c + TWO_PI;
    let t3 = cseg.w * d3 * d3 - 2.0 * d3 * cseg.wt + cseg.wt2;

    t1 + t2 + t3
}

/// First index whose θ ≥ bound.
fn partition_lt(sorted: &[(f64, f64)], bound: f64) -> usize {
    sorted.partition_point(|(t, _)| *t < bound)
}

/// First index whose θ > bound.
fn partition_le(sorted: &[(f64, f64)], bound: f64) -> usize {
    sorted.partition_point(|(t, _)| *t <= bound)
}

#[derive(Clone, Copy)]
struct Seg {
    w: f64,
    wt: f64,
    wt2: f64,
}

struct Prefix {
    w: Vec<f64>,
    wt: Vec<f64>,
    wt2: Vec<f64>,
}

impl Prefix {
    fn build(sorted: &[(f64, f64)]) -> Prefix {
        let n = sorted.len();
        let mut w = vec![0.0; n + 1];
        let mut wt = vec![0.0; n + 1];
        let mut wt2 = vec![0.0; n + 1];
        for (i, (t, wi)) in sorted.iter().enumerate() {
            w[i + 1] = w[i] + wi;
            wt[i + 1] = wt[i] + wi * t;
            wt2[i + 1] = wt2[i] + wi * t * t;
        }
        Prefix { w, wt, wt2 }
    }

    fn seg(&self, from: usize, to: usize) -> Seg {
        Seg {
            w: self.w[to] - self.w[from],
            wt: self.wt[to] - self.wt[from],
            wt2: self.wt2[to] - self.wt2[from],
        }
    }
}

/// Circle Fréchet mean together with the branch that realized it: which
/// points were lifted by +2π (in original index order) and the constant
/// offset between the weighted sum of lifted angles and the wrapped result.
/// The classifier's differentiation needs the branch to express the output
/// as a linear function of the weights.
#[derive(Clone, Debug)]
pub(crate) struct FmSo2Branch {
    pub angle: AngleSO2,
    pub degenerate: bool,
    pub lifted: Vec<bool>,
}

pub(crate) fn fm_so2_branch(points: &[AngleSO2], weights: &ConvexWeights) -> Result<FmSo2Branch> {
    check_lengths(points.len(), weights)?;
    let n = points.len();

    if n == 1 {
        return Ok(FmSo2Branch { angle: points[0], degenerate: false, lifted: vec![false] });
    }

    // Sort by angle; candidate m lifts the m smallest angles across the cut.
    let mut sorted: Vec<(f64, f64, usize)> = points
        .iter()
        .zip(weights.as_slice())
        .enumerate()
        .map(|(i, (p, w))| (p.theta(), *w, i))
        .collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let flat: Vec<(f64, f64)> = sorted.iter().map(|&(t, w, _)| (t, w)).collect();
    let pw = Prefix::build(&flat);

    // Raw candidates are nondecreasing in the cut index, so cuts that differ
    // only by zero-weight shifts produce consecutive duplicates; drop them
    // before evaluating (the expanded objective has ~1e−16 cancellation noise,
    // which must not pick between ulp-identical candidates). The first and
    // last distinct candidates can still coincide after wrapping.
    let total_wt = pw.wt[n];
    let mut cuts: Vec<(usize, f64)> = Vec::with_capacity(n); // (m, raw)
    for m in 0..n {
        let raw = total_wt + TWO_PI * pw.w[m];
        if cuts.last().map_or(true, |(_, prev)| (raw - prev).abs() >= TIE_SEPARATION * 1e-3) {
            cuts.push((m, raw));
        }
    }
    let mut candidates: Vec<(f64, f64, usize)> = Vec::with_capacity(cuts.len()); // (obj, angle, m)
    for (m, raw) in cuts {
        let c = AngleSO2::new(raw)?.theta();
        if let Some(&(_, first_c, _)) = candidates.first() {
            if m > 0 && wrapped_abs(c - first_c) < TIE_SEPARATION * 1e-3 {
                continue; // wrapped duplicate of the first cut
            }
        }
        let obj = circle_objective(c, &flat, &pw);
        candidates.push((obj, c, m));
    }

    let mut best = candidates[0];
    for &cand in &candidates[1..] {
        if cand.0 < best.0 {
            best = cand;
        }
    }
    let (best_obj, _, _) = best;

    // Cluster near-optimal candidates; distinct clusters mean a true tie.
    let tol = TIE_REL_TOL * best_obj.abs().max(1.0);
    let mut reps: Vec<(f64, f64, usize)> = Vec::new();
    for &(obj, c, m) in &candidates {
        if obj > best_obj + tol {
            continue;
        }
        match reps.iter_mut().find(|(_, rc, _)| wrapped_abs(c - *rc) < TIE_SEPARATION) {
            Some(rep) => {
                if obj < rep.0 {
                    *rep = (obj, c, m);
                }
            }
            None => reps.push((obj, c, m)),
        }
    }

    let (degenerate, chosen) = if reps.len() > 1 {
        let mut pick = reps[0];
        for &rep in &reps[1..] {
            if rep.1 < pick.1 {
                pick = rep;
            }
        }
        (true, pick)
    } else {
        (false, best)
    };

    let mut lifted = vec![false; n];
    for &(_, _, orig) in sorted.iter().take(chosen.2) {
        lifted[orig] = true;
    }
    Ok(FmSo2Branch { angle: AngleSO2::new(chosen.1)?, degenerate, lifted })
}

/// Weighted Fréchet mean on SO(2) by exhaustive branch enumeration.
///
/// A degenerate tie between distinct global minimizers is resolved toward the
/// candidate with the smallest theta and flagged.
pub fn fm_so2(points: &[AngleSO2], weights: &ConvexWeights) -> Result<FmSo2> {
    let branch = fm_so2_branch(points, weights)?;
    Ok(FmSo2 { angle: branch.angle, degenerate: branch.degenerate })
}

fn wrapped_abs(d: f64) -> f64 {
    let a = d.abs() % TWO_PI;
    a.min(TWO_PI - a)
}

/// Weighted Fréchet mean on the product manifold; the objective separates, so
/// the factor means are computed independently.
pub fn wfm_c(points: &[PolarComplex], weights: &ConvexWeights) -> Result<WfmC> {
    check_lengths(points.len(), weights)?;
    let scales: Vec<ScaleP1> = points.iter().map(|p| p.scale).collect();
    let angles: Vec<AngleSO2> = points.iter().map(|p| p.angle).collect();
    let scale = fm_p1(&scales, weights)?;
    let fm = fm_so2(&angles, weights)?;
    Ok(WfmC {
        point: PolarComplex::new(scale, fm.angle),
        degenerate: fm.degenerate,
    })
}
