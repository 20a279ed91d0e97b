//! Classical Euclidean James-Stein machinery.
//!
//! Serves as the flat-space reference implementation and the oracle the
//! manifold shrinkage tests are checked against. Plain James-Stein (not
//! positive-part) is implemented; the shrinkage factor may go negative.

use crate::error::{Error, Result};

/// An observed Gaussian vector with known per-coordinate variance.
#[derive(Clone, Debug)]
pub struct EuclideanObservation {
    pub x: Vec<f64>,
    pub sigma2: f64,
}

impl EuclideanObservation {
    pub fn new(x: Vec<f64>, sigma2: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::usage("observation must have p >= 1"));
        }
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::usage(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(EuclideanObservation { x, sigma2 })
    }

    pub fn p(&self) -> usize {
        self.x.len()
    }
}

/// Scalar prior mean and variance for the hierarchical MAP family.
#[derive(Clone, Copy, Debug)]
pub struct EuclideanPrior {
    pub mu: f64,
    pub tau2: f64,
}

impl EuclideanPrior {
    pub fn new(mu: f64, tau2: f64) -> Result<Self> {
        if !tau2.is_finite() || tau2 < 0.0 {
            return Err(Error::usage(format!("tau2 must be >= 0, got {tau2}")));
        }
        Ok(EuclideanPrior { mu, tau2 })
    }
}

/// James-Stein shrinkage output with the degenerate-input flags.
#[derive(Clone, Debug)]
pub struct JsEstimate {
    pub theta: Vec<f64>,
    /// ‖x‖ was zero: the estimate is the zero vector by convention.
    pub singular: bool,
    /// p < 3, below the dominance regime.
    pub low_dim_warning: bool,
}

/// (1 − (p−2)σ²/‖x‖²)·x. Dominates the MLE for p > 2.
pub fn js_estimate(obs: &EuclideanObservation) -> JsEstimate {
    let p = obs.p();
    let norm2: f64 = obs.x.iter().map(|v| v * v).sum();
    if norm2 == 0.0 {
        return JsEstimate { theta: vec![0.0; p], singular: true, low_dim_warning: p < 3 };
    }
    let factor = 1.0 - (p as f64 - 2.0) * obs.sigma2 / norm2;
    JsEstimate {
        theta: obs.x.iter().map(|v| factor * v).collect(),
        singular: false,
        low_dim_warning: p < 3,
    }
}

/// MAP estimate under a N(μ, τ²) prior: convex blend of data and prior mean.
pub fn map_estimate(obs: &EuclideanObservation, prior: &EuclideanPrior) -> Vec<f64> {
    let a = prior.tau2 / (prior.tau2 + obs.sigma2);
    let b = obs.sigma2 / (prior.tau2 + obs.sigma2);
    obs.x.iter().map(|v| a * v + b * prior.mu).collect()
}

/// Unbiased risk estimate for the MAP family:
/// −pσ² + ‖θ̂ − x‖² + 2σ²·Σᵢ ∂θ̂ᵢ/∂xᵢ, with ∂θ̂ᵢ/∂xᵢ = τ²/(τ²+σ²).
pub fn sure_euclidean(obs: &EuclideanObservation, prior: &EuclideanPrior) -> f64 {
    let p = obs.p() as f64;
    let theta = map_estimate(obs, prior);
    let resid: f64 = theta.iter().zip(&obs.x).map(|(t, x)| (t - x) * (t - x)).sum();
    let div = prior.tau2 / (prior.tau2 + obs.sigma2);
    -p * obs.sigma2 + resid + 2.0 * obs.sigma2 * p * div
}
