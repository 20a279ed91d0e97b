//! Experiment command line: synthetic data generation, risk simulations,
//! classifier training, and evaluation.
//!
//! Every run writes a `run.json` echoing the fully resolved configuration so
//! that artifacts are reproducible byte-for-byte from (flags, seed). Exit
//! codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cshrink::classifier::baseline::{baseline_accuracy, train_baseline};
use cshrink::classifier::{
    evaluate, train, Checkpoint, Dataset, GenConfig, ModelConfig, TrainConfig,
};
use cshrink::dominance::{emit_csv, run_theorem1, run_theorem2, ExperimentConfig};
use cshrink::error::{Error, Result};

#[derive(Parser)]
#[command(name = "cshrink", version, about = "Shrinkage estimation and prototype classification for complex-valued signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic complex-signal dataset CSV.
    GenData(GenDataArgs),
    /// Run the Monte Carlo risk experiments and emit CSV records.
    Simulate(SimulateArgs),
    /// Train the prototype classifier (or the real-valued baseline).
    Train(TrainArgs),
    /// Evaluate a trained checkpoint on a dataset.
    Eval(EvalArgs),
}

#[derive(Args, Serialize)]
struct GenDataArgs {
    /// Number of classes (>= 2).
    #[arg(long, default_value_t = 4)]
    classes: usize,
    /// Signals per class.
    #[arg(long, default_value_t = 40)]
    per_class: usize,
    /// SNR tags in dB, cycled over each class's signals.
    #[arg(long, value_delimiter = ',', default_value = "10", allow_negative_numbers = true)]
    snr: Vec<f64>,
    /// Samples per signal.
    #[arg(long, default_value_t = 128)]
    length: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path; run.json is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// Key-value config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    inner_resamples: Option<usize>,
    #[arg(long)]
    truth_lambda: Option<f64>,
    #[arg(long)]
    mixture_k: Option<usize>,
    /// Skip the sup-gap experiment.
    #[arg(long, default_value_t = false)]
    skip_theorem1: bool,
    /// Skip the risk-dominance experiment.
    #[arg(long, default_value_t = false)]
    skip_theorem2: bool,
}

#[derive(Args, Serialize, Clone)]
struct TrainArgs {
    /// Training dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Test dataset CSV; when absent, --data is split 50/50 by row parity.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Known data variance of the prototype shrinkage (0 = MLE mode).
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    #[arg(long, default_value_t = 120)]
    epochs: usize,
    #[arg(long, default_value_t = 0.03)]
    lr: f64,
    #[arg(long, default_value_t = 400)]
    batch: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    channels: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 2)]
    stride: usize,
    #[arg(long, default_value_t = 2)]
    mixture_k: usize,
    /// "csure" trains the prototype classifier; "baseline" the logistic
    /// reference on flattened (re, im).
    #[arg(long, default_value = "csure")]
    arch: String,
}

#[derive(Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

fn write_run_json<T: Serialize>(dir: &Path, subcommand: &str, args: &T) -> Result<()> {
    #[derive(Serialize)]
    struct RunRecord<'a, T> {
        subcommand: &'a str,
        config: &'a T,
    }
    let record = RunRecord { subcommand, config: args };
    let text = serde_json::to_string_pretty(&record)
        .map_err(|e| Error::data(format!("run.json serialization failed: {e}")))?;
    let path = dir.join("run.json");
    std::fs::write(&path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn cmd_gen_data(args: &GenDataArgs) -> Result<()> {
    let cfg = GenConfig {
        classes: args.classes,
        per_class: args.per_class,
        snr_list: args.snr.clone(),
        seed: args.seed,
        length: args.length,
    };
    let ds = Dataset::generate(&cfg)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    ds.write_csv(&args.out)?;
    let dir = args.out.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    write_run_json(&dir, "gen-data", args)?;
    println!("wrote {} signals to {}", ds.signals.len(), args.out.display());
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            ExperimentConfig::from_text(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(p_grid) = &args.p_grid {
        cfg.p_grid = p_grid.clone();
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(n) = args.n_samples {
        cfg.n_samples = n;
    }
    if let Some(v) = args.v {
        cfg.v = v;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(ir) = args.inner_resamples {
        cfg.inner_resamples = ir;
    }
    if let Some(tl) = args.truth_lambda {
        cfg.truth_lambda = tl;
    }
    if let Some(k) = args.mixture_k {
        cfg.mixture_k = k;
    }
    cfg.validate()?;
    ensure_dir(&args.out_dir)?;
    write_run_json(&args.out_dir, "simulate", args)?;

    if !args.skip_theorem1 {
        let (records, skipped) = run_theorem1(&cfg)?;
        let path = args.out_dir.join("theorem1.csv");
        emit_csv(&records, &path)?;
        println!(
            "sup-gap experiment: {} records ({} trials skipped) -> {}",
            records.len(),
            skipped,
            path.display()
        );
    }
    if !args.skip_theorem2 {
        let records = run_theorem2(&cfg)?;
        let path = args.out_dir.join("theorem2.csv");
        emit_csv(&records, &path)?;
        let wins = records.iter().filter(|r| r.risk_sure <= r.risk_mle).count();
        println!(
            "risk-dominance experiment: {} records, shrinkage at or below MLE in {}/{} -> {}",
            records.len(),
            wins,
            records.len(),
            path.display()
        );
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let full = Dataset::read_csv(&args.data)?;
    let (train_ds, test_ds) = match &args.test {
        Some(path) => (full, Dataset::read_csv(path)?),
        None => full.split_even_odd(),
    };
    ensure_dir(&args.out_dir)?;
    write_run_json(&args.out_dir, "train", args)?;

    match args.arch.as_str() {
        "baseline" => {
            let model = train_baseline(&train_ds, args.epochs, args.lr)?;
            let train_acc = baseline_accuracy(&model, &train_ds)?;
            let test_acc = baseline_accuracy(&model, &test_ds)?;
            #[derive(Serialize)]
            struct BaselineReport {
                train_accuracy: f64,
                test_accuracy: f64,
            }
            let report = BaselineReport { train_accuracy: train_acc, test_accuracy: test_acc };
            let path = args.out_dir.join("baseline.json");
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::data(format!("report serialization failed: {e}")))?;
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            println!("baseline: train {train_acc:.4}, test {test_acc:.4} -> {}", path.display());
            Ok(())
        }
        "csure" => {
            let mut cfg = ModelConfig::for_classes(train_ds.num_classes().max(2), args.v);
            cfg.signal_len = train_ds.length;
            cfg.channels = args.channels;
            cfg.window = args.window;
            cfg.stride = args.stride;
            cfg.mixture_k = args.mixture_k;
            let tc = TrainConfig {
                epochs: args.epochs,
                learning_rate: args.lr,
                batch_size: args.batch,
                seed: args.seed,
            };
            let (checkpoint, metrics) = train(&train_ds, &test_ds, &cfg, &tc)?;
            let metrics_path = args.out_dir.join("metrics.csv");
            cshrink::classifier::train::write_metrics_csv(&metrics, &metrics_path)?;
            let ck_path = args.out_dir.join("checkpoint.json");
            checkpoint.save(&ck_path)?;
            let last = metrics.last().expect("epochs >= 1");
            println!(
                "trained {} epochs (mode {}): train {:.4}, test {:.4} -> {}",
                metrics.len(),
                checkpoint.mode,
                last.train_acc,
                last.test_acc,
                ck_path.display()
            );
            Ok(())
        }
        other => Err(Error::usage(format!("unknown --arch {other}; use csure or baseline"))),
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let checkpoint = Checkpoint::load(&args.checkpoint)?;
    let ds = Dataset::read_csv(&args.data)?;
    let report = evaluate(&checkpoint.model, &checkpoint.params, &checkpoint.prototypes, &ds)?;
    ensure_dir(&args.out_dir)?;
    write_run_json(&args.out_dir, "eval", args)?;
    let path = args.out_dir.join("eval.json");
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::data(format!("report serialization failed: {e}")))?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    println!("accuracy {:.6} on {} signals", report.accuracy, ds.signals.len());
    if !report.per_snr.is_empty() {
        println!("snr_db,count,accuracy");
        for row in &report.per_snr {
            println!("{},{},{:.6}", row.snr_db, row.count, row.accuracy);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
