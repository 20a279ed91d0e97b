//! Trivial real-valued reference: multinomial logistic regression on the
//! flattened (re, im) samples. Exists only as a chance-beating baseline for
//! the synthetic benchmark.

use serde::{Deserialize, Serialize};

use crate::classifier::data::Dataset;
use crate::classifier::train::Adam;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineModel {
    pub classes: usize,
    pub signal_len: usize,
    /// classes × (2·signal_len + 1) weights, bias last.
    pub w: Vec<f64>,
}

fn features(ds: &Dataset) -> Vec<Vec<f64>> {
    ds.signals
        .iter()
        .map(|s| {
            let mut f = Vec::with_capacity(2 * ds.length + 1);
            for p in &s.samples {
                let (re, im) = p.to_cartesian();
                f.push(re);
                f.push(im);
            }
            f.push(1.0);
            f
        })
        .collect()
}

fn logits(model: &BaselineModel, x: &[f64]) -> Vec<f64> {
    let d = 2 * model.signal_len + 1;
    (0..model.classes)
        .map(|c| model.w[c * d..(c + 1) * d].iter().zip(x).map(|(w, xi)| w * xi).sum())
        .collect()
}

pub fn train_baseline(ds: &Dataset, epochs: usize, lr: f64) -> Result<BaselineModel> {
    let classes = ds.num_classes();
    if classes < 2 {
        return Err(Error::data("baseline needs at least two classes"));
    }
    let d = 2 * ds.length + 1;
    let mut model =
        BaselineModel { classes, signal_len: ds.length, w: vec![0.0; classes * d] };
    let xs = features(ds);
    let mut adam = Adam::new(model.w.len(), lr);
    let n = xs.len() as f64;
    for _ in 0..epochs {
        let mut grad = vec![0.0; model.w.len()];
        for (x, s) in xs.iter().zip(&ds.signals) {
            let z = logits(&model, x);
            let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
            let total: f64 = exps.iter().sum();
            for c in 0..classes {
                let p = exps[c] / total - if c == s.label { 1.0 } else { 0.0 };
                for (g, xi) in grad[c * d..(c + 1) * d].iter_mut().zip(x) {
                    *g += p * xi / n;
                }
            }
        }
        adam.step(&mut model.w, &grad);
    }
    Ok(model)
}

pub fn baseline_accuracy(model: &BaselineModel, ds: &Dataset) -> Result<f64> {
    if ds.length != model.signal_len {
        return Err(Error::data("dataset length does not match baseline model"));
    }
    let xs = features(ds);
    let mut correct = 0usize;
    for (x, s) in xs.iter().zip(&ds.signals) {
        let z = logits(model, x);
        let pred = z
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        if pred == s.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.signals.len() as f64)
}
