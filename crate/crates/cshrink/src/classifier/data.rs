//! Complex-signal dataset: CSV interchange and the synthetic generator.
//!
//! The file format is one row per signal:
//! `id,label,snr_db,re_0,im_0,…,re_{L-1},im_{L-1}`. The generator emits a
//! phase-constellation benchmark: class c keys its symbols over c+2 phases
//! spread across a class-specific sector of the circle (sector centers are
//! equispaced over the full turn). Distinct sectors give every class a
//! unique, well-separated circular mean, which is what makes distances to
//! per-class prototypes informative; a full-circle constellation would have a
//! degenerate mean. Symbols get log-normal amplitude jitter and additive
//! complex Gaussian noise at the tagged SNR.

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use std::path::Path;

use crate::error::{Error, Result};
use crate::manifold::PolarComplex;

/// One labelled complex-valued time series.
#[derive(Clone, Debug)]
pub struct ComplexSignal {
    pub id: u64,
    pub label: usize,
    pub snr_db: Option<f64>,
    pub samples: Vec<PolarComplex>,
}

/// A dataset of equal-length signals.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub signals: Vec<ComplexSignal>,
    pub length: usize,
}

/// Generator settings for the synthetic benchmark.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub classes: usize,
    pub per_class: usize,
    pub snr_list: Vec<f64>,
    pub seed: u64,
    pub length: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { classes: 4, per_class: 40, snr_list: vec![10.0], seed: 1, length: 128 }
    }
}

/// Amplitude jitter in log-scale.
const AMPLITUDE_JITTER_SD: f64 = 0.1;

impl Dataset {
    pub fn num_classes(&self) -> usize {
        self.signals.iter().map(|s| s.label + 1).max().unwrap_or(0)
    }

    /// Generate the synthetic benchmark. Each class gets exactly `per_class`
    /// signals; SNR tags cycle through `snr_list`. Deterministic in the seed.
    pub fn generate(cfg: &GenConfig) -> Result<Dataset> {
        if cfg.classes < 2 {
            return Err(Error::usage(format!("need at least 2 classes, got {}", cfg.classes)));
        }
        if cfg.per_class == 0 || cfg.length == 0 || cfg.snr_list.is_empty() {
            return Err(Error::usage("per_class, length and snr_list must be nonempty"));
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(cfg.seed);
        let mut signals = Vec::with_capacity(cfg.classes * cfg.per_class);
        let mut id = 0u64;
        let half_width =
            (std::f64::consts::PI / cfg.classes as f64 * 0.6).min(0.35);
        for class in 0..cfg.classes {
            let n_phases = class + 2;
            let base = 2.0 * std::f64::consts::PI * class as f64 / cfg.classes as f64;
            let atom = |m: usize| {
                base - half_width + 2.0 * half_width * m as f64 / (n_phases - 1) as f64
            };
            for i in 0..cfg.per_class {
                let snr_db = cfg.snr_list[i % cfg.snr_list.len()];
                let noise_sd = (10f64.powf(-snr_db / 10.0) / 2.0).sqrt();
                let mut samples = Vec::with_capacity(cfg.length);
                for _ in 0..cfg.length {
                    let phase = atom(rng.gen_range(0..n_phases));
                    let amp =
                        (AMPLITUDE_JITTER_SD * rng.sample::<f64, _>(StandardNormal)).exp();
                    let re = amp * phase.cos() + noise_sd * rng.sample::<f64, _>(StandardNormal);
                    let im = amp * phase.sin() + noise_sd * rng.sample::<f64, _>(StandardNormal);
                    samples.push(PolarComplex::from_cartesian(re, im)?);
                }
                signals.push(ComplexSignal { id, label: class, snr_db: Some(snr_db), samples });
                id += 1;
            }
        }
        Ok(Dataset { signals, length: cfg.length })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("id,label,snr_db");
        for i in 0..self.length {
            out.push_str(&format!(",re_{i},im_{i}"));
        }
        out.push('\n');
        for s in &self.signals {
            if s.samples.len() != self.length {
                return Err(Error::data(format!(
                    "signal {} has {} samples, dataset length is {}",
                    s.id,
                    s.samples.len(),
                    self.length
                )));
            }
            out.push_str(&s.id.to_string());
            out.push(',');
            out.push_str(&s.label.to_string());
            out.push(',');
            if let Some(snr) = s.snr_db {
                out.push_str(&format!("{snr}"));
            }
            for p in &s.samples {
                let (re, im) = p.to_cartesian();
                out.push_str(&format!(",{re},{im}"));
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Dataset> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::data("empty dataset file"))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 5 || cols[0] != "id" || cols[1] != "label" || cols[2] != "snr_db" {
            return Err(Error::data("bad dataset header"));
        }
        if (cols.len() - 3) % 2 != 0 {
            return Err(Error::data("dataset header must hold re/im pairs"));
        }
        let length = (cols.len() - 3) / 2;
        let expected = 2 * length + 3;

        let mut signals = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != expected {
                return Err(Error::data(format!(
                    "row {}: {} fields, expected {expected}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let id = fields[0]
                .parse()
                .map_err(|_| Error::data(format!("row {}: bad id", lineno + 2)))?;
            let label = fields[1]
                .parse()
                .map_err(|_| Error::data(format!("row {}: bad label", lineno + 2)))?;
            let snr_db = if fields[2].is_empty() {
                None
            } else {
                Some(
                    fields[2]
                        .parse()
                        .map_err(|_| Error::data(format!("row {}: bad snr_db", lineno + 2)))?,
                )
            };
            let mut samples = Vec::with_capacity(length);
            for i in 0..length {
                let re: f64 = fields[3 + 2 * i].parse().map_err(|_| {
                    Error::data(format!("row {}: bad re_{i}", lineno + 2))
                })?;
                let im: f64 = fields[4 + 2 * i].parse().map_err(|_| {
                    Error::data(format!("row {}: bad im_{i}", lineno + 2))
                })?;
                samples.push(PolarComplex::from_cartesian(re, im)?);
            }
            signals.push(ComplexSignal { id, label, snr_db, samples });
        }
        Ok(Dataset { signals, length })
    }

    /// Deterministic 50/50 split by row parity (even rows train, odd test).
    pub fn split_even_odd(&self) -> (Dataset, Dataset) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, s) in self.signals.iter().enumerate() {
            if i % 2 == 0 {
                train.push(s.clone());
            } else {
                test.push(s.clone());
            }
        }
        (
            Dataset { signals: train, length: self.length },
            Dataset { signals: test, length: self.length },
        )
    }
}
