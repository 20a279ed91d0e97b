//! Training loop, evaluation, and checkpoint serialization.
//!
//! Per epoch: a no-gradient pass refreshes the running class means and the
//! shrinkage fits, then the gradient pass updates the head parameters, the
//! channel mixing weights, and the mixture weights with Adam under softmax
//! cross-entropy. Prototype statistics are constants inside the backward
//! pass. Everything is seeded; identical seeds reproduce identical artifacts.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::classifier::data::{ComplexSignal, Dataset};
use crate::classifier::net::{
    build_model_vars, forward_instance, materialize_protos, wfm_forward, ModelConfig, ModelVars,
    PrototypeState, ProtoSource,
};
use crate::classifier::tape::Tape;
use crate::error::{Error, Result};
use crate::manifold::PolarComplex;
use crate::stats::derive_seed;

/// Optimizer and schedule settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 120, learning_rate: 0.03, batch_size: 400, seed: 7 }
    }
}

/// One metrics row per epoch.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MetricsRow {
    pub epoch: usize,
    pub train_acc: f64,
    pub test_acc: f64,
    pub loss: f64,
}

/// Everything needed to evaluate or resume: architecture, optimizer config,
/// flat parameters, and the prototype statistics with fit diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// "MLE" when v = 0, otherwise "SHRINKAGE".
    pub mode: String,
    pub params: Vec<f64>,
    pub prototypes: PrototypeState,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::data(format!("checkpoint serialization failed: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::data(format!("bad checkpoint JSON: {e}")))?;
        ck.model.validate()?;
        let layout = crate::classifier::net::param_layout(&ck.model);
        if ck.params.len() != layout.total {
            return Err(Error::data(format!(
                "checkpoint has {} parameters, architecture needs {}",
                ck.params.len(),
                layout.total
            )));
        }
        Ok(ck)
    }
}

/// Adam with bias correction.
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let mhat = self.m[i] / b1t;
            let vhat = self.v[i] / b2t;
            params[i] -= self.lr * mhat / (vhat.sqrt() + self.eps);
        }
    }
}

/// Mean cross-entropy of a batch plus its gradient with respect to the flat
/// parameters. `frozen` evaluates against the saved class means (no gradient
/// into the mixture weights); training uses the shrink-target form.
pub fn batch_loss_and_grad(
    params: &[f64],
    cfg: &ModelConfig,
    state: &PrototypeState,
    batch: &[&ComplexSignal],
    frozen: bool,
) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::usage("empty batch"));
    }
    let mut tape = Tape::new();
    let source =
        if frozen { ProtoSource::Frozen(state) } else { ProtoSource::TrainTime(state) };
    let vars = build_model_vars(&mut tape, params, cfg, source)?;
    let mut losses = Vec::with_capacity(batch.len());
    for signal in batch {
        if signal.label >= cfg.classes {
            return Err(Error::data(format!(
                "label {} out of range {}",
                signal.label, cfg.classes
            )));
        }
        let fwd = forward_instance(&mut tape, &vars, cfg, &signal.samples)?;
        losses.push(tape.cross_entropy(&fwd.logits, signal.label));
    }
    let inv = 1.0 / batch.len() as f64;
    let coeffs = vec![inv; losses.len()];
    let loss_node = tape.lincomb(&losses, &coeffs);
    let loss = tape.value(loss_node);
    let grads = tape.backward(loss_node);
    let grad_vec: Vec<f64> = vars.leaves.iter().map(|v| tape.grad_of(&grads, *v)).collect();
    Ok((loss, grad_vec))
}

/// Per-class, per-channel feature points of a batch, for the running-mean
/// update.
fn collect_class_features(
    batch: &[&ComplexSignal],
    vars: &ModelVars,
    cfg: &ModelConfig,
) -> Result<BTreeMap<usize, Vec<Vec<PolarComplex>>>> {
    let mut map: BTreeMap<usize, Vec<Vec<PolarComplex>>> = BTreeMap::new();
    for signal in batch {
        let grid = wfm_forward(&signal.samples, &vars.alpha_weights, cfg)?;
        let entry = map
            .entry(signal.label)
            .or_insert_with(|| vec![Vec::new(); cfg.channels]);
        for t in 0..grid.positions {
            for (j, chan) in entry.iter_mut().enumerate() {
                chan.push(grid.point(t, j));
            }
        }
    }
    Ok(map)
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

fn check_dataset(ds: &Dataset, cfg: &ModelConfig, what: &str) -> Result<()> {
    if ds.signals.is_empty() {
        return Err(Error::data(format!("{what} dataset is empty")));
    }
    if ds.length != cfg.signal_len {
        return Err(Error::data(format!(
            "{what} dataset length {} does not match model signal_len {}",
            ds.length, cfg.signal_len
        )));
    }
    if let Some(bad) = ds.signals.iter().find(|s| s.label >= cfg.classes) {
        return Err(Error::data(format!(
            "{what} dataset has label {} but model has {} classes",
            bad.label, cfg.classes
        )));
    }
    Ok(())
}

/// Train the prototype classifier; returns the checkpoint and per-epoch
/// metrics. Fails with a numerical error naming the epoch if the loss
/// diverges.
pub fn train(
    train_ds: &Dataset,
    test_ds: &Dataset,
    cfg: &ModelConfig,
    tc: &TrainConfig,
) -> Result<(Checkpoint, Vec<MetricsRow>)> {
    cfg.validate()?;
    check_dataset(train_ds, cfg, "train")?;
    check_dataset(test_ds, cfg, "test")?;
    if tc.epochs == 0 || tc.batch_size == 0 {
        return Err(Error::usage("epochs and batch_size must be >= 1"));
    }

    let mut params = crate::classifier::net::init_params(cfg, tc.seed);
    let mut state = PrototypeState::new(cfg);
    let mut adam = Adam::new(params.len(), tc.learning_rate);
    let mut metrics = Vec::with_capacity(tc.epochs);

    for epoch in 0..tc.epochs {
        let order = shuffled_indices(train_ds.signals.len(), derive_seed(tc.seed, 3, epoch as u64, 0));
        let batches: Vec<Vec<usize>> =
            order.chunks(tc.batch_size).map(|c| c.to_vec()).collect();

        // Refresh pass: running means and shrinkage fits, no gradients.
        state.begin_epoch();
        for batch_idx in &batches {
            let batch: Vec<&ComplexSignal> =
                batch_idx.iter().map(|&i| &train_ds.signals[i]).collect();
            let mut tape = Tape::new();
            let vars = build_model_vars(&mut tape, &params, cfg, ProtoSource::None)?;
            let feats = collect_class_features(&batch, &vars, cfg)?;
            state.update_running_fm(&feats)?;
        }
        state.refresh_fits()?;

        // Gradient pass.
        let mut epoch_losses = Vec::with_capacity(batches.len());
        for batch_idx in &batches {
            let batch: Vec<&ComplexSignal> =
                batch_idx.iter().map(|&i| &train_ds.signals[i]).collect();
            let (loss, grads) = batch_loss_and_grad(&params, cfg, &state, &batch, false)?;
            if !loss.is_finite() {
                return Err(Error::numerical(format!(
                    "training diverged at epoch {epoch}: loss = {loss}"
                )));
            }
            adam.step(&mut params, &grads);
            if params.iter().any(|p| !p.is_finite()) {
                return Err(Error::numerical(format!(
                    "training diverged at epoch {epoch}: non-finite parameters"
                )));
            }
            epoch_losses.push(loss);
        }

        materialize_protos(&mut state, &params, cfg)?;
        let train_acc = evaluate(cfg, &params, &state, train_ds)?.accuracy;
        let test_acc = evaluate(cfg, &params, &state, test_ds)?.accuracy;
        metrics.push(MetricsRow {
            epoch,
            train_acc,
            test_acc,
            loss: crate::stats::mean(&epoch_losses),
        });
    }

    let checkpoint = Checkpoint {
        model: cfg.clone(),
        train: tc.clone(),
        mode: if cfg.v == 0.0 { "MLE".to_string() } else { "SHRINKAGE".to_string() },
        params,
        prototypes: state,
    };
    Ok((checkpoint, metrics))
}

/// Per-SNR accuracy entry.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SnrAccuracy {
    pub snr_db: f64,
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Deterministic evaluation report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[truth][prediction]` counts; rows sum to per-class totals.
    pub confusion: Vec<Vec<usize>>,
    /// Present when signals carry SNR tags; sorted by SNR ascending.
    pub per_snr: Vec<SnrAccuracy>,
}

/// Classify every signal against the saved class means.
pub fn evaluate(
    cfg: &ModelConfig,
    params: &[f64],
    state: &PrototypeState,
    ds: &Dataset,
) -> Result<EvalReport> {
    check_dataset(ds, cfg, "eval")?;
    if !state.protos_ready() {
        return Err(Error::usage("prototypes not materialized; train or load a checkpoint"));
    }
    let mut confusion = vec![vec![0usize; cfg.classes]; cfg.classes];
    let mut snr_groups: BTreeMap<i64, (f64, usize, usize)> = BTreeMap::new();
    let mut correct = 0usize;

    for signal in &ds.signals {
        let mut tape = Tape::new();
        let vars = build_model_vars(&mut tape, params, cfg, ProtoSource::Frozen(state))?;
        let fwd = forward_instance(&mut tape, &vars, cfg, &signal.samples)?;
        let mut pred = 0usize;
        let mut best = f64::NEG_INFINITY;
        for (c, l) in fwd.logits.iter().enumerate() {
            let v = tape.value(*l);
            if v > best {
                best = v;
                pred = c;
            }
        }
        confusion[signal.label][pred] += 1;
        let hit = pred == signal.label;
        if hit {
            correct += 1;
        }
        if let Some(snr) = signal.snr_db {
            let key = (snr * 1024.0).round() as i64;
            let entry = snr_groups.entry(key).or_insert((snr, 0, 0));
            entry.1 += 1;
            if hit {
                entry.2 += 1;
            }
        }
    }

    let per_snr = snr_groups
        .values()
        .map(|&(snr_db, count, correct)| SnrAccuracy {
            snr_db,
            count,
            correct,
            accuracy: correct as f64 / count as f64,
        })
        .collect();
    Ok(EvalReport {
        accuracy: correct as f64 / ds.signals.len() as f64,
        confusion,
        per_snr,
    })
}

/// Write per-epoch metrics as `epoch,train_acc,test_acc,loss`.
pub fn write_metrics_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let mut out = String::from("epoch,train_acc,test_acc,loss\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.epoch, r.train_acc, r.test_acc, r.loss));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
