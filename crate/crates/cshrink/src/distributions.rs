//! Log-Normal and mixture-of-Log-Normal distributions on P1 x SO(2).
//!
//! A point follows a log-normal law when its log-coordinates are Gaussian.
//! Only isotropic covariances are supported (the estimator never uses more).
//! Sampling draws the unwrapped Gaussian in log-coordinates and canonicalizes
//! the angle; for the variances used here (≤ 0.5) the wrapped and unwrapped
//! laws differ negligibly, which is a documented limitation.
//!
//! All sampling is driven by Xoshiro256++ seeded from a u64, so fixed seeds
//! produce bit-identical streams across runs and platforms.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{exp_map, log_map, signed_angle_diff, LogCoord, PolarComplex};

/// Isotropic log-normal on the product manifold: log-coordinates are
/// N(log mean, cov_scale · I₂).
#[derive(Clone, Copy, Debug)]
pub struct LogNormalOnC {
    mean: PolarComplex,
    cov_scale: f64,
}

impl LogNormalOnC {
    /// `cov_scale` must be finite and nonnegative; zero degenerates to a
    /// point mass at the mean.
    pub fn new(mean: PolarComplex, cov_scale: f64) -> Result<Self> {
        if !cov_scale.is_finite() || cov_scale < 0.0 {
            return Err(Error::usage(format!("cov_scale must be >= 0, got {cov_scale}")));
        }
        Ok(LogNormalOnC { mean, cov_scale })
    }

    pub fn mean(&self) -> PolarComplex {
        self.mean
    }

    pub fn cov_scale(&self) -> f64 {
        self.cov_scale
    }

    /// Draw one sample using an external generator.
    pub fn sample_with(&self, rng: &mut impl Rng) -> PolarComplex {
        let m = log_map(&self.mean);
        let sd = self.cov_scale.sqrt();
        let zu: f64 = rng.sample(StandardNormal);
        let zs: f64 = rng.sample(StandardNormal);
        exp_map(&LogCoord::from_us(m.u() + sd * zu, m.s() + sd * zs))
    }

    /// Draw `n` samples from a fresh stream seeded with `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<PolarComplex> {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }

    /// Gaussian log-density in log-coordinates, with the angle difference
    /// taken along the shorter arc.
    pub fn logpdf(&self, x: &PolarComplex) -> f64 {
        let m = log_map(&self.mean);
        let l = log_map(x);
        let du = l.u() - m.u();
        let dth = signed_angle_diff(l.theta(), m.theta());
        let ds = std::f64::consts::SQRT_2 * dth;
        let q = du * du + ds * ds;
        -(2.0 * std::f64::consts::PI * self.cov_scale).ln() - q / (2.0 * self.cov_scale)
    }
}

/// Finite mixture of isotropic log-normals with simplex weights.
#[derive(Clone, Debug)]
pub struct MixtureLogNormal {
    weights: Vec<f64>,
    components: Vec<LogNormalOnC>,
}

impl MixtureLogNormal {
    pub fn new(weights: Vec<f64>, components: Vec<LogNormalOnC>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::usage("mixture needs at least one component"));
        }
        if weights.len() != components.len() {
            return Err(Error::usage(format!(
                "weights ({}) and components ({}) disagree",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
            return Err(Error::usage("mixture weights must lie in [0, 1]"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::usage(format!("mixture weights must sum to 1, got {sum}")));
        }
        Ok(MixtureLogNormal { weights, components })
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[LogNormalOnC] {
        &self.components
    }

    /// Ancestral sampling: component index from the weights, then the
    /// component's log-normal.
    pub fn sample_with(&self, rng: &mut impl Rng) -> PolarComplex {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut idx = self.components.len() - 1;
        for (k, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                idx = k;
                break;
            }
        }
        self.components[idx].sample_with(rng)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<PolarComplex> {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }

    /// Mixture log-density via log-sum-exp over the components.
    pub fn logpdf(&self, x: &PolarComplex) -> f64 {
        let terms: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.components)
            .map(|(w, c)| {
                if *w == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    w.ln() + c.logpdf(x)
                }
            })
            .collect();
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
    }

    pub fn to_json(&self) -> String {
        let repr = MixtureJson {
            weights: self.weights.clone(),
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    mean_r: c.mean().r(),
                    mean_theta: c.mean().theta(),
                    var: c.cov_scale(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("mixture serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: MixtureJson =
            serde_json::from_str(text).map_err(|e| Error::data(format!("bad mixture JSON: {e}")))?;
        let components = repr
            .components
            .iter()
            .map(|c| LogNormalOnC::new(PolarComplex::from_parts(c.mean_r, c.mean_theta)?, c.var))
            .collect::<Result<Vec<_>>>()?;
        MixtureLogNormal::new(repr.weights, components)
    }
}

#[derive(Serialize, Deserialize)]
struct MixtureJson {
    weights: Vec<f64>,
    components: Vec<ComponentJson>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    mean_r: f64,
    mean_theta: f64,
    var: f64,
}
