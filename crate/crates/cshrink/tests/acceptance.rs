//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines; every tolerance is pinned in code.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use cshrink::classifier::data::{Dataset, GenConfig};
use cshrink::classifier::net::{
    build_model_vars, materialize_protos, param_layout,
    prototype_distance_features, wfm_forward, ModelConfig, PrototypeState, ProtoSource,
};
use cshrink::classifier::tape::Tape;
use cshrink::classifier::train::{batch_loss_and_grad, evaluate, train, TrainConfig};
use cshrink::classifier::ComplexSignal;
use cshrink::distributions::LogNormalOnC;
use cshrink::dominance::{emit_csv, run_theorem1, run_theorem2, ExperimentConfig};
use cshrink::frechet::{wfm_c, ConvexWeights};
use cshrink::james_stein::{js_estimate, map_estimate, sure_euclidean, EuclideanObservation, EuclideanPrior};
use cshrink::manifold::{
    canonicalize_angle, dist_c, dist_p1, dist_so2, exp_map, log_map, LogCoord, PolarComplex,
};
use cshrink::shrinkage::{
    component_map_estimate, shrinkage_estimate, sure_objective, MixingMode,
    SampleSummary, SureFit,
};
use cshrink::stats::{mean, median, spearman, stderr};

fn report(name: &str, ok: bool, detail: &str) {
    println!("[acceptance] {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name} failed: {detail}");
}

// Euclidean James-Stein dominance: p = 10, sigma^2 = 1, 1e5 trials per truth
// norm in {0, 1, 3, 10}; MSE strictly below the MLE risk with a 3-stderr
// margin, and MSE at the origin inside [1.9, 2.1].
#[test]
fn euclidean_js_dominance() {
    let p = 10;
    let trials = 100_000;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xACCE01);
    let mut all_ok = true;
    let mut details = Vec::new();
    for norm in [0.0, 1.0, 3.0, 10.0] {
        let mut theta = vec![0.0; p];
        theta[0] = norm;
        let mut losses = Vec::with_capacity(trials);
        for _ in 0..trials {
            let x: Vec<f64> =
                theta.iter().map(|t| t + rng.sample::<f64, _>(StandardNormal)).collect();
            let obs = EuclideanObservation::new(x, 1.0).unwrap();
            let est = js_estimate(&obs);
            let loss: f64 =
                est.theta.iter().zip(&theta).map(|(a, b)| (a - b) * (a - b)).sum();
            losses.push(loss);
        }
        let mse = mean(&losses);
        let se = stderr(&losses);
        let dominates = mse < p as f64 - 3.0 * se;
        all_ok &= dominates;
        if norm == 0.0 {
            all_ok &= (1.9..=2.1).contains(&mse);
        }
        details.push(format!("|theta|={norm}: mse={mse:.4}+-{se:.4}"));
    }
    report("euclidean-js-dominance", all_ok, &details.join(", "));
}

// SURE unbiasedness, Euclidean and manifold: at 5 fixed prior probes the mean
// SURE minus mean realized loss stays within 3 stderr of the per-draw
// difference over 1e5 draws.
#[test]
fn sure_unbiasedness() {
    let draws = 100_000;
    let mut all_ok = true;
    let mut details = Vec::new();

    // Euclidean side.
    let theta = vec![0.8, -0.4, 1.5, 0.0, 2.2, -1.0, 0.3, 0.9];
    let probes = [(0.0, 0.25), (0.0, 1.0), (0.5, 0.5), (-0.3, 2.0), (1.0, 0.05)];
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xACCE02);
    let mut diffs: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); probes.len()];
    for _ in 0..draws {
        let x: Vec<f64> =
            theta.iter().map(|t| t + rng.sample::<f64, _>(StandardNormal)).collect();
        let obs = EuclideanObservation::new(x, 1.0).unwrap();
        for (i, (mu, tau2)) in probes.iter().enumerate() {
            let prior = EuclideanPrior::new(*mu, *tau2).unwrap();
            let est = map_estimate(&obs, &prior);
            let loss: f64 =
                est.iter().zip(&theta).map(|(a, b)| (a - b) * (a - b)).sum();
            diffs[i].push(sure_euclidean(&obs, &prior) - loss);
        }
    }
    for (i, d) in diffs.iter().enumerate() {
        let bias = mean(d);
        let se = stderr(d);
        let ok = bias.abs() <= 3.0 * se;
        all_ok &= ok;
        details.push(format!("euclid probe {i}: bias={bias:.5}, 3se={:.5}", 3.0 * se));
    }

    // Manifold side: fixed truth, fixed (mu, lambda) probes.
    let p = 16;
    let n_samples = 5;
    let v = 0.25;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xACCE03);
    let truth: Vec<PolarComplex> = (0..p)
        .map(|_| {
            exp_map(&LogCoord::from_us(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        })
        .collect();
    let mu_probes = [
        exp_map(&LogCoord::from_us(0.0, 0.0)),
        exp_map(&LogCoord::from_us(0.4, 0.2)),
        exp_map(&LogCoord::from_us(-0.5, 0.5)),
        exp_map(&LogCoord::from_us(0.1, -0.7)),
        exp_map(&LogCoord::from_us(0.8, 0.0)),
    ];
    let lambda_probes = [0.1, 0.25, 0.5, 1.0, 2.0];
    let uniform = ConvexWeights::uniform(n_samples).unwrap();
    let dists: Vec<LogNormalOnC> =
        truth.iter().map(|m| LogNormalOnC::new(*m, v).unwrap()).collect();
    let mut diffs: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); mu_probes.len()];
    let manifold_draws = draws;
    let mut buf = Vec::with_capacity(n_samples);
    for _ in 0..manifold_draws {
        let mut xbar = Vec::with_capacity(p);
        for d in &dists {
            buf.clear();
            for _ in 0..n_samples {
                buf.push(d.sample_with(&mut rng));
            }
            xbar.push(wfm_c(&buf, &uniform).unwrap().point);
        }
        let summary = SampleSummary::new(xbar, n_samples).unwrap();
        for (i, (mu, lambda)) in mu_probes.iter().zip(lambda_probes).enumerate() {
            let sure = sure_objective(&summary, mu, lambda, v);
            let loss: f64 = summary
                .xbar()
                .iter()
                .zip(&truth)
                .map(|(x, m)| {
                    let e = component_map_estimate(x, mu, lambda, v);
                    let d = dist_c(&e, m);
                    d * d
                })
                .sum();
            diffs[i].push(sure - loss);
        }
    }
    for (i, d) in diffs.iter().enumerate() {
        let bias = mean(d);
        let se = stderr(d);
        let ok = bias.abs() <= 3.0 * se;
        all_ok &= ok;
        details.push(format!("manifold probe {i}: bias={bias:.5}, 3se={:.5}", 3.0 * se));
    }

    report("sure-unbiasedness", all_ok, &details.join("; "));
}

// Uniform SURE-loss convergence: the median per-dimension sup gap decreases
// strictly along p in {8, 32, 128, 512} with Spearman(p, median) <= -0.9
// over 100 trials per p.
#[test]
fn theorem1_trend() {
    let mut cfg = ExperimentConfig::default();
    cfg.p_grid = vec![8, 32, 128, 512];
    cfg.trials = 100;
    cfg.seed = 0xACCE04;
    let (records, skipped) = run_theorem1(&cfg).unwrap();
    let medians: Vec<f64> = cfg
        .p_grid
        .iter()
        .map(|&p| {
            let gaps: Vec<f64> =
                records.iter().filter(|r| r.p == p).map(|r| r.sup_gap).collect();
            median(&gaps)
        })
        .collect();
    let strictly_decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let ps: Vec<f64> = cfg.p_grid.iter().map(|&p| p as f64).collect();
    let rho = spearman(&ps, &medians);
    let ok = strictly_decreasing && rho <= -0.9;
    report(
        "theorem1-trend",
        ok,
        &format!("medians={medians:?}, spearman={rho:.3}, skipped={skipped}"),
    );
}

// Risk dominance of the fitted shrinkage estimator over the Frechet-mean MLE
// at p = 128 (margin >= 2 stderr of the paired difference, win fraction >=
// 0.8) and p = 512 (win fraction >= 0.95).
#[test]
fn theorem2_dominance() {
    let mut cfg = ExperimentConfig::default();
    cfg.p_grid = vec![128, 512];
    cfg.trials = 200;
    cfg.n_samples = 10;
    cfg.v = 0.25;
    cfg.mixture_k = 1;
    cfg.inner_resamples = 64;
    cfg.seed = 0xACCE05;
    let records = run_theorem2(&cfg).unwrap();

    let mut ok = true;
    let mut details = Vec::new();
    for (&p, min_fraction) in cfg.p_grid.iter().zip([0.8, 0.95]) {
        let rs: Vec<&cshrink::dominance::TrialRecord> =
            records.iter().filter(|r| r.p == p).collect();
        let diffs: Vec<f64> = rs.iter().map(|r| r.risk_mle - r.risk_sure).collect();
        let margin = mean(&diffs);
        let se = stderr(&diffs);
        let wins = rs.iter().filter(|r| r.risk_sure <= r.risk_mle).count();
        let fraction = wins as f64 / rs.len() as f64;
        if p == 128 {
            ok &= margin >= 2.0 * se;
        }
        ok &= fraction >= min_fraction;
        details.push(format!(
            "p={p}: mean(mle-sure)={margin:.4}+-{se:.4}, wins={fraction:.3}"
        ));
    }
    report("theorem2-dominance", ok, &details.join("; "));
}

// MLE reduction: with v = 0 the estimator returns the per-dimension Frechet
// means to 1e-12, and the classifier's distance features equal the raw
// running-mean variant to 1e-12 end to end.
#[test]
fn mle_reduction() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xACCE06);
    // Estimator level.
    let xbar: Vec<PolarComplex> = (0..32)
        .map(|_| {
            PolarComplex::from_parts(rng.gen_range(0.2..4.0), rng.gen_range(-3.0..3.0)).unwrap()
        })
        .collect();
    let summary = SampleSummary::new(xbar.clone(), 6).unwrap();
    let fits = SureFit::fit(&summary, 0.5, 2).unwrap(); // arbitrary fit, ignored at v = 0
    let model = cshrink::shrinkage::HierarchicalModel::new(
        0.0,
        vec![0.5, 0.5],
        fits.components.iter().map(|c| c.mu_hat).collect(),
        fits.components.iter().map(|c| c.lambda_hat).collect(),
    )
    .unwrap();
    let est = shrinkage_estimate(&summary, &model, &fits, MixingMode::Algebra).unwrap();
    let mut est_ok = true;
    for (e, x) in est.iter().zip(&xbar) {
        est_ok &= (log_map(e).u() - log_map(x).u()).abs() < 1e-12;
        est_ok &= dist_so2(e.angle, x.angle) < 1e-12;
    }

    // End-to-end classifier features with v = 0 versus raw running means.
    let gen = GenConfig { classes: 3, per_class: 6, snr_list: vec![8.0], seed: 61, length: 48 };
    let ds = Dataset::generate(&gen).unwrap();
    let mut cfg = ModelConfig::for_classes(3, 0.0);
    cfg.signal_len = 48;
    cfg.channels = 4;
    let params = cshrink::classifier::net::init_params(&cfg, 2);
    let mut state = PrototypeState::new(&cfg);
    let mut tape = Tape::new();
    let vars = build_model_vars(&mut tape, &params, &cfg, ProtoSource::None).unwrap();
    let mut class_features: BTreeMap<usize, Vec<Vec<PolarComplex>>> = BTreeMap::new();
    for s in &ds.signals {
        let grid = wfm_forward(&s.samples, &vars.alpha_weights, &cfg).unwrap();
        let entry =
            class_features.entry(s.label).or_insert_with(|| vec![Vec::new(); cfg.channels]);
        for t in 0..grid.positions {
            for (j, chan) in entry.iter_mut().enumerate() {
                chan.push(grid.point(t, j));
            }
        }
    }
    state.update_running_fm(&class_features).unwrap();
    state.refresh_fits().unwrap();
    materialize_protos(&mut state, &params, &cfg).unwrap();

    // Raw-FM variant: prototypes are exactly the running means.
    let mut raw_state = state.clone();
    raw_state.materialize_raw_running_means().unwrap();

    let mut feat_ok = true;
    let mut max_gap: f64 = 0.0;
    for s in ds.signals.iter().take(6) {
        let grid = wfm_forward(&s.samples, &vars.alpha_weights, &cfg).unwrap();
        let a = prototype_distance_features(&grid, &state).unwrap();
        let b = prototype_distance_features(&grid, &raw_state).unwrap();
        for (x, y) in a.iter().zip(&b) {
            max_gap = max_gap.max((x - y).abs());
            feat_ok &= (x - y).abs() < 1e-12;
        }
    }
    report(
        "mle-reduction",
        est_ok && feat_ok,
        &format!("estimator exact: {est_ok}, max feature gap {max_gap:.2e}"),
    );
}

// Geometry suite on randomized instances: metric axioms, the wrap case,
// principal-branch canonicalization, left-translation equivariance of the
// weighted Frechet mean (1e-9), and exact one-hot selection.
#[test]
fn geometry_suite() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xACCE07);
    let mut ok = true;
    let pi = std::f64::consts::PI;

    // wrap case to 1e-12
    let a = canonicalize_angle(pi - 0.1).unwrap();
    let b = canonicalize_angle(-pi + 0.1).unwrap();
    ok &= (dist_so2(a, b) - std::f64::consts::SQRT_2 * 0.2).abs() < 1e-12;

    for _ in 0..2000 {
        // principal branch
        let raw = rng.gen_range(-40.0..40.0);
        let t = canonicalize_angle(raw).unwrap().theta();
        ok &= t > -pi && t <= pi;
        let k = rng.gen_range(-3i32..=3);
        let shifted = canonicalize_angle(raw + 2.0 * pi * k as f64).unwrap();
        ok &= dist_so2(canonicalize_angle(raw).unwrap(), shifted) < 1e-12;

        // metric axioms
        let pts: Vec<PolarComplex> = (0..3)
            .map(|_| {
                PolarComplex::from_parts(rng.gen_range(0.05..20.0), rng.gen_range(-9.0..9.0))
                    .unwrap()
            })
            .collect();
        ok &= dist_c(&pts[0], &pts[1]) == dist_c(&pts[1], &pts[0]);
        ok &= dist_c(&pts[0], &pts[2])
            <= dist_c(&pts[0], &pts[1]) + dist_c(&pts[1], &pts[2]) + 1e-12;
        ok &= dist_p1(pts[0].scale, pts[1].scale) >= 0.0;
        ok &= dist_so2(pts[0].angle, pts[1].angle) <= std::f64::consts::SQRT_2 * pi + 1e-15;

        // left-translation equivariance of the weighted Frechet mean
        let n = rng.gen_range(2..7);
        let cloud: Vec<PolarComplex> = (0..n)
            .map(|_| {
                PolarComplex::from_parts(rng.gen_range(0.2..4.0), rng.gen_range(-3.0..3.0))
                    .unwrap()
            })
            .collect();
        let free: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let w = ConvexWeights::from_free(&free).unwrap();
        let g =
            PolarComplex::from_parts(rng.gen_range(0.2..4.0), rng.gen_range(-3.0..3.0)).unwrap();
        let base = wfm_c(&cloud, &w).unwrap().point;
        let moved: Vec<PolarComplex> = cloud.iter().map(|p| g * *p).collect();
        let shifted = wfm_c(&moved, &w).unwrap().point;
        ok &= dist_c(&shifted, &(g * base)) < 1e-9;

        // one-hot selection exactness (bit-exact log coordinates)
        let hot = rng.gen_range(0..n);
        let onehot = ConvexWeights::one_hot(n, hot).unwrap();
        let sel = wfm_c(&cloud, &onehot).unwrap().point;
        ok &= sel.scale.log_r() == cloud[hot].scale.log_r();
        ok &= sel.angle.theta() == cloud[hot].angle.theta();
    }
    report("geometry-suite", ok, "2000 randomized instances");
}

// Gradient checks on micro-batches: head parameters to 1e-4 relative and
// wFM mixing weights to 1e-3 relative against central finite differences,
// prototypes held fixed.
#[test]
fn gradient_checks() {
    let gen = GenConfig { classes: 2, per_class: 6, snr_list: vec![12.0], seed: 71, length: 32 };
    let ds = Dataset::generate(&gen).unwrap();
    let mut cfg = ModelConfig::for_classes(2, 0.5);
    cfg.signal_len = 32;
    cfg.channels = 4;
    cfg.conv_filters = 4;
    cfg.hidden = 8;
    let params = cshrink::classifier::net::init_params(&cfg, 9);

    let mut state = PrototypeState::new(&cfg);
    let mut tape = Tape::new();
    let vars = build_model_vars(&mut tape, &params, &cfg, ProtoSource::None).unwrap();
    let mut class_features: BTreeMap<usize, Vec<Vec<PolarComplex>>> = BTreeMap::new();
    for s in &ds.signals {
        let grid = wfm_forward(&s.samples, &vars.alpha_weights, &cfg).unwrap();
        let entry =
            class_features.entry(s.label).or_insert_with(|| vec![Vec::new(); cfg.channels]);
        for t in 0..grid.positions {
            for (j, chan) in entry.iter_mut().enumerate() {
                chan.push(grid.point(t, j));
            }
        }
    }
    state.update_running_fm(&class_features).unwrap();
    state.refresh_fits().unwrap();
    materialize_protos(&mut state, &params, &cfg).unwrap();

    let micro: Vec<&ComplexSignal> =
        vec![&ds.signals[0], &ds.signals[gen.per_class]]; // one per class
    let (_, grads) = batch_loss_and_grad(&params, &cfg, &state, &micro, true).unwrap();
    let f =
        |p: &[f64]| -> f64 { batch_loss_and_grad(p, &cfg, &state, &micro, true).unwrap().0 };

    let layout = param_layout(&cfg);
    let h = 1e-5;
    let mut ok = true;
    let mut worst_head: f64 = 0.0;
    for idx in layout
        .conv_w
        .clone()
        .chain(layout.conv_b.clone())
        .chain(layout.fc1_b.clone())
        .chain(layout.fc2_w.clone())
        .chain(layout.fc2_b.clone())
        .step_by(2)
    {
        let mut hi = params.clone();
        let mut lo = params.clone();
        hi[idx] += h;
        lo[idx] -= h;
        let fd = (f(&hi) - f(&lo)) / (2.0 * h);
        let an = grads[idx];
        let rel = (an - fd).abs() / an.abs().max(fd.abs()).max(1e-4);
        worst_head = worst_head.max(rel);
        ok &= rel <= 1e-4;
    }

    let mut worst_wfm: f64 = 0.0;
    for idx in layout.wfm.clone() {
        let mut hi = params.clone();
        let mut lo = params.clone();
        hi[idx] += h;
        lo[idx] -= h;
        let fd = (f(&hi) - f(&lo)) / (2.0 * h);
        let an = grads[idx];
        let rel = (an - fd).abs() / an.abs().max(fd.abs()).max(1e-3);
        worst_wfm = worst_wfm.max(rel);
        ok &= rel <= 1e-3;
    }
    report(
        "gradient-checks",
        ok,
        &format!("worst head rel {worst_head:.2e}, worst wfm rel {worst_wfm:.2e}"),
    );
}

// Directional hyperparameter sweep: 4 classes, 40 training signals per class
// at 10 dB, 5 seeds; mean test accuracy at v = 1 must not fall below v = 0
// and both must reach 0.85. (Over-shrinkage at v = 10 is allowed to lose.)
#[test]
fn v_sweep_direction() {
    let seeds = [101u64, 102, 103, 104, 105];
    let mut acc = BTreeMap::new();
    for v in [0.0, 1.0] {
        let mut accs = Vec::new();
        for &seed in &seeds {
            let gen_train = GenConfig {
                classes: 4,
                per_class: 40,
                snr_list: vec![10.0],
                seed,
                length: 128,
            };
            let gen_test = GenConfig { seed: seed + 1000, ..gen_train.clone() };
            let train_ds = Dataset::generate(&gen_train).unwrap();
            let test_ds = Dataset::generate(&gen_test).unwrap();
            let cfg = ModelConfig::for_classes(4, v);
            let tc = TrainConfig {
                epochs: 30,
                learning_rate: 0.03,
                batch_size: 400,
                seed,
            };
            let (ck, metrics) = train(&train_ds, &test_ds, &cfg, &tc).unwrap();
            assert_eq!(ck.mode, if v == 0.0 { "MLE" } else { "SHRINKAGE" });
            accs.push(metrics.last().unwrap().test_acc);
        }
        acc.insert(format!("{v}"), mean(&accs));
    }
    let v0 = acc["0"];
    let v1 = acc["1"];
    let ok = v1 >= v0 && v0 >= 0.85 && v1 >= 0.85;
    report("v-sweep-direction", ok, &format!("mean acc v=0: {v0:.4}, v=1: {v1:.4}"));
}

// Per-SNR accuracy rises with SNR on the synthetic benchmark:
// Spearman(snr, accuracy) >= 0.9.
#[test]
fn snr_monotonicity() {
    let snrs = vec![-16.0, -12.0, -8.0, -4.0, 0.0, 4.0, 8.0];
    let gen_train = GenConfig {
        classes: 4,
        per_class: 42,
        snr_list: snrs.clone(),
        seed: 131,
        length: 128,
    };
    let gen_test =
        GenConfig { per_class: 70, seed: 132, ..gen_train.clone() };
    let train_ds = Dataset::generate(&gen_train).unwrap();
    let test_ds = Dataset::generate(&gen_test).unwrap();
    let cfg = ModelConfig::for_classes(4, 1.0);
    let tc = TrainConfig { epochs: 35, learning_rate: 0.03, batch_size: 400, seed: 7 };
    let (ck, _) = train(&train_ds, &test_ds, &cfg, &tc).unwrap();
    let reportv = evaluate(&ck.model, &ck.params, &ck.prototypes, &test_ds).unwrap();
    let xs: Vec<f64> = reportv.per_snr.iter().map(|r| r.snr_db).collect();
    let ys: Vec<f64> = reportv.per_snr.iter().map(|r| r.accuracy).collect();
    let rho = spearman(&xs, &ys);
    let ok = rho >= 0.9;
    report("snr-monotonicity", ok, &format!("per-snr acc {ys:?}, spearman {rho:.3}"));
}

// Determinism: identical seeds reproduce byte-identical CSV and checkpoint
// artifacts across two runs.
#[test]
fn determinism() {
    let dir = std::env::temp_dir().join("cshrink_acceptance_det");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let mut ok = true;

    // dataset CSV
    let gen = GenConfig { classes: 2, per_class: 6, snr_list: vec![6.0], seed: 55, length: 32 };
    for name in ["a.csv", "b.csv"] {
        Dataset::generate(&gen).unwrap().write_csv(&dir.join(name)).unwrap();
    }
    ok &= std::fs::read(dir.join("a.csv")).unwrap() == std::fs::read(dir.join("b.csv")).unwrap();

    // simulation CSVs
    let mut cfg = ExperimentConfig::default();
    cfg.p_grid = vec![8];
    cfg.trials = 5;
    cfg.inner_resamples = 4;
    cfg.seed = 11;
    for name in ["t1_a.csv", "t1_b.csv"] {
        let (records, _) = run_theorem1(&cfg).unwrap();
        emit_csv(&records, &dir.join(name)).unwrap();
    }
    ok &=
        std::fs::read(dir.join("t1_a.csv")).unwrap() == std::fs::read(dir.join("t1_b.csv")).unwrap();
    for name in ["t2_a.csv", "t2_b.csv"] {
        let records = run_theorem2(&cfg).unwrap();
        emit_csv(&records, &dir.join(name)).unwrap();
    }
    ok &=
        std::fs::read(dir.join("t2_a.csv")).unwrap() == std::fs::read(dir.join("t2_b.csv")).unwrap();

    // checkpoint JSON
    let gen_train = GenConfig { classes: 2, per_class: 8, snr_list: vec![10.0], seed: 57, length: 32 };
    let train_ds = Dataset::generate(&gen_train).unwrap();
    let test_ds = Dataset::generate(&GenConfig { seed: 58, ..gen_train.clone() }).unwrap();
    let mut mc = ModelConfig::for_classes(2, 1.0);
    mc.signal_len = 32;
    mc.channels = 4;
    let tc = TrainConfig { epochs: 2, learning_rate: 0.03, batch_size: 400, seed: 3 };
    for name in ["ck_a.json", "ck_b.json"] {
        let (ck, _) = train(&train_ds, &test_ds, &mc, &tc).unwrap();
        ck.save(&dir.join(name)).unwrap();
    }
    ok &= std::fs::read(dir.join("ck_a.json")).unwrap()
        == std::fs::read(dir.join("ck_b.json")).unwrap();

    report("determinism", ok, "dataset, simulation CSVs, checkpoint JSON");
}

// Separability sanity: two well-separated synthetic classes reach 0.95 test
// accuracy within 30 epochs, and a nearest-prototype rule on raw per-signal
// Frechet means already separates them.
#[test]
fn two_class_separability() {
    let gen_train =
        GenConfig { classes: 2, per_class: 50, snr_list: vec![10.0], seed: 141, length: 128 };
    let gen_test = GenConfig { seed: 142, ..gen_train.clone() };
    let train_ds = Dataset::generate(&gen_train).unwrap();
    let test_ds = Dataset::generate(&gen_test).unwrap();

    // Oracle: nearest class mean on raw signal Frechet means.
    let uniform = ConvexWeights::uniform(128).unwrap();
    let fm_of = |s: &ComplexSignal| wfm_c(&s.samples, &uniform).unwrap().point;
    let class_means: Vec<PolarComplex> = (0..2)
        .map(|c| {
            let pts: Vec<PolarComplex> = train_ds
                .signals
                .iter()
                .filter(|s| s.label == c)
                .map(&fm_of)
                .collect();
            wfm_c(&pts, &ConvexWeights::uniform(pts.len()).unwrap()).unwrap().point
        })
        .collect();
    let mut oracle_correct = 0;
    for s in &test_ds.signals {
        let fm = fm_of(s);
        let pred = if dist_c(&fm, &class_means[0]) <= dist_c(&fm, &class_means[1]) { 0 } else { 1 };
        if pred == s.label {
            oracle_correct += 1;
        }
    }
    let oracle_acc = oracle_correct as f64 / test_ds.signals.len() as f64;

    let cfg = ModelConfig::for_classes(2, 1.0);
    let tc = TrainConfig { epochs: 30, learning_rate: 0.03, batch_size: 400, seed: 7 };
    let (_, metrics) = train(&train_ds, &test_ds, &cfg, &tc).unwrap();
    let best = metrics.iter().map(|m| m.test_acc).fold(0.0, f64::max);
    let ok = best >= 0.95 && oracle_acc >= 0.95;
    report(
        "two-class-separability",
        ok,
        &format!("best test acc {best:.4} within 30 epochs, raw-FM oracle {oracle_acc:.4}"),
    );
}

// No-signal control: shuffled labels keep test accuracy within 3 sigma of
// chance.
#[test]
fn shuffled_labels_are_chance() {
    let gen_train =
        GenConfig { classes: 4, per_class: 30, snr_list: vec![10.0], seed: 151, length: 64 };
    let gen_test = GenConfig { seed: 152, ..gen_train.clone() };
    let mut train_ds = Dataset::generate(&gen_train).unwrap();
    let test_ds = Dataset::generate(&gen_test).unwrap();
    // destroy the signal-label association deterministically
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0xACCE08);
    for s in train_ds.signals.iter_mut() {
        s.label = rng.gen_range(0..4);
    }
    let mut cfg = ModelConfig::for_classes(4, 1.0);
    cfg.signal_len = 64;
    let tc = TrainConfig { epochs: 15, learning_rate: 0.03, batch_size: 400, seed: 7 };
    let (ck, metrics) = train(&train_ds, &test_ds, &cfg, &tc).unwrap();
    let _ = ck;
    let acc = metrics.last().unwrap().test_acc;
    // binomial sd around chance 1/4 over 120 test signals
    let n = test_ds.signals.len() as f64;
    let sigma = (0.25 * 0.75 / n).sqrt();
    let ok = (acc - 0.25).abs() <= 3.0 * sigma + 1e-9;
    report(
        "shuffled-labels-chance",
        ok,
        &format!("test acc {acc:.4}, chance 0.25 +- {:.4}", 3.0 * sigma),
    );
}
