//! Shrinkage estimation and prototype classification for complex-valued data.
//!
//! The complex plane is treated as the product Riemannian manifold P1 x SO(2)
//! under the Log-Euclidean metric. On top of that geometry the crate provides
//! log-normal distributions, weighted Fréchet means, a SURE-tuned James-Stein
//! shrinkage estimator of per-dimension means, a Monte Carlo harness that
//! checks the estimator's risk behaviour against the Fréchet-mean MLE, and a
//! small prototype classifier for synthetic complex-valued signals.

pub mod classifier;
pub mod distributions;
pub mod dominance;
pub mod error;
pub mod frechet;
pub mod james_stein;
pub mod manifold;
pub mod shrinkage;
pub mod stats;

pub use error::{Error, Result};
pub use manifold::{AngleSO2, LogCoord, PolarComplex, ScaleP1};
