//! Model layers: weighted-Fréchet-mean convolution over complex sequences,
//! shrinkage-estimated class prototypes, min-distance features, and a small
//! real-valued head.
//!
//! The forward pass is built on the reverse-mode tape so training and
//! evaluation share one code path. The manifold-valued part runs in plain
//! floats first (branch choices, argmins); only the windows that survive the
//! min-distance selection are materialized as tape nodes, with the chosen
//! wrap branch recorded as constant coefficients.
//!
//! Gradient flow stops at the prototype statistics: the running means and the
//! fitted (μ̂, λ̂) are constants inside the backward pass, and the mixture
//! weights receive gradients only through the estimator formula with those
//! fits fixed.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::classifier::tape::{Tape, Var};
use crate::error::{Error, Result};
use crate::frechet::{fm_p1, fm_so2_branch, ConvexWeights};
use crate::manifold::{
    dist_c, exp_map, log_map, signed_angle_diff, AngleSO2, LogCoord, PolarComplex, ScaleP1,
};
use crate::shrinkage::{SampleSummary, SureFit};
use crate::stats::derive_seed;

/// Architecture and estimator hyperparameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelConfig {
    pub classes: usize,
    pub signal_len: usize,
    pub channels: usize,
    pub window: usize,
    pub stride: usize,
    pub mixture_k: usize,
    pub conv_filters: usize,
    pub conv_width: usize,
    pub hidden: usize,
    /// Known data variance for the prototype shrinkage; 0 selects MLE mode.
    pub v: f64,
    /// Momentum of the running log-domain mean estimate.
    pub momentum: f64,
}

impl ModelConfig {
    /// Desk-scale defaults: one wFM layer, 8 channels, window 5, stride 2.
    pub fn for_classes(classes: usize, v: f64) -> Self {
        ModelConfig {
            classes,
            signal_len: 128,
            channels: 8,
            window: 5,
            stride: 2,
            mixture_k: 2,
            conv_filters: 8,
            conv_width: 3,
            hidden: 16,
            v,
            momentum: 0.9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 1 || self.channels < 1 || self.mixture_k < 1 {
            return Err(Error::usage("classes, channels, mixture_k must be >= 1"));
        }
        if self.window < 1 || self.stride < 1 || self.window > self.signal_len {
            return Err(Error::usage("need 1 <= window <= signal_len and stride >= 1"));
        }
        if self.conv_width > self.feat_dim() {
            return Err(Error::usage("conv_width exceeds the distance-feature length"));
        }
        if !self.v.is_finite() || self.v < 0.0 {
            return Err(Error::usage(format!("v must be >= 0, got {}", self.v)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::usage("momentum must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn out_positions(&self) -> usize {
        (self.signal_len - self.window) / self.stride + 1
    }

    /// Distance features: one per (class, channel).
    pub fn feat_dim(&self) -> usize {
        self.classes * self.channels
    }

    pub fn conv_out_len(&self) -> usize {
        self.feat_dim() - self.conv_width + 1
    }

    pub fn conv_out_total(&self) -> usize {
        self.conv_filters * self.conv_out_len()
    }
}

/// Offsets of each parameter block in the flat parameter vector.
#[derive(Clone, Debug)]
pub struct ParamLayout {
    pub wfm: std::ops::Range<usize>,
    pub mix: std::ops::Range<usize>,
    pub conv_w: std::ops::Range<usize>,
    pub conv_b: std::ops::Range<usize>,
    pub fc1_w: std::ops::Range<usize>,
    pub fc1_b: std::ops::Range<usize>,
    pub fc2_w: std::ops::Range<usize>,
    pub fc2_b: std::ops::Range<usize>,
    pub total: usize,
}

pub fn param_layout(cfg: &ModelConfig) -> ParamLayout {
    let mut at = 0;
    let mut take = |n: usize| {
        let r = at..at + n;
        at += n;
        r
    };
    let wfm = take(cfg.channels * cfg.window);
    let mix = take(cfg.classes * cfg.mixture_k);
    let conv_w = take(cfg.conv_filters * cfg.conv_width);
    let conv_b = take(cfg.conv_filters);
    let fc1_w = take(cfg.hidden * cfg.conv_out_total());
    let fc1_b = take(cfg.hidden);
    let fc2_w = take(cfg.classes * cfg.hidden);
    let fc2_b = take(cfg.classes);
    ParamLayout { wfm, mix, conv_w, conv_b, fc1_w, fc1_b, fc2_w, fc2_b, total: at }
}

/// Seeded initial parameters: diverse channel mixing weights, uniform mixture
/// weights, fan-scaled head weights.
pub fn init_params(cfg: &ModelConfig, seed: u64) -> Vec<f64> {
    use rand::Rng;
    use rand::SeedableRng;
    use rand_distr::StandardNormal;
    let layout = param_layout(cfg);
    let mut rng =
        rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(derive_seed(seed, 0x11, 0, 0));
    let mut p = vec![0.0; layout.total];
    for i in layout.wfm.clone() {
        p[i] = 0.5 * rng.sample::<f64, _>(StandardNormal);
    }
    // mixture free weights start at 0 (uniform simplex)
    let xavier = |rng: &mut rand_xoshiro::Xoshiro256PlusPlus, fan_in: usize, fan_out: usize| {
        let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
        rng.gen_range(-a..a)
    };
    for i in layout.conv_w.clone() {
        p[i] = xavier(&mut rng, cfg.conv_width, cfg.conv_filters);
    }
    for i in layout.fc1_w.clone() {
        p[i] = xavier(&mut rng, cfg.conv_out_total(), cfg.hidden);
    }
    for i in layout.fc2_w.clone() {
        p[i] = xavier(&mut rng, cfg.hidden, cfg.classes);
    }
    p
}

/// One wFM output with the branch data needed to express it as a linear
/// function of the channel weights: ∂u/∂αᵢ is the window's log-scale, and
/// ∂θ/∂αᵢ is the window's angle lifted into the chosen branch.
#[derive(Clone, Debug)]
pub struct WfmOut {
    pub u: f64,
    pub theta: f64,
    pub u_locals: Vec<f64>,
    pub th_locals: Vec<f64>,
}

/// Grid of wFM outputs: positions × channels.
#[derive(Clone, Debug)]
pub struct WfmGrid {
    pub positions: usize,
    pub channels: usize,
    outs: Vec<WfmOut>,
}

impl WfmGrid {
    pub fn at(&self, t: usize, j: usize) -> &WfmOut {
        &self.outs[t * self.channels + j]
    }

    pub fn point(&self, t: usize, j: usize) -> PolarComplex {
        let o = self.at(t, j);
        exp_map(&LogCoord::from_u_theta(o.u, o.theta))
    }
}

/// Strided weighted-Fréchet-mean convolution of one signal.
pub fn wfm_forward(
    signal: &[PolarComplex],
    channel_weights: &[ConvexWeights],
    cfg: &ModelConfig,
) -> Result<WfmGrid> {
    if signal.len() != cfg.signal_len {
        return Err(Error::data(format!(
            "signal length {} does not match configured {}",
            signal.len(),
            cfg.signal_len
        )));
    }
    if channel_weights.len() != cfg.channels {
        return Err(Error::usage("one weight vector per output channel required"));
    }
    let positions = cfg.out_positions();
    let mut outs = Vec::with_capacity(positions * cfg.channels);
    let mut scales: Vec<ScaleP1> = Vec::with_capacity(cfg.window);
    let mut angles: Vec<AngleSO2> = Vec::with_capacity(cfg.window);
    for t in 0..positions {
        let start = t * cfg.stride;
        let win = &signal[start..start + cfg.window];
        scales.clear();
        angles.clear();
        scales.extend(win.iter().map(|p| p.scale));
        angles.extend(win.iter().map(|p| p.angle));
        for w in channel_weights {
            let scale = fm_p1(&scales, w)?;
            let branch = fm_so2_branch(&angles, w)?;
            let u_locals: Vec<f64> = scales.iter().map(|s| s.log_r()).collect();
            let th_locals: Vec<f64> = angles
                .iter()
                .zip(&branch.lifted)
                .map(|(a, lifted)| {
                    a.theta() + if *lifted { 2.0 * std::f64::consts::PI } else { 0.0 }
                })
                .collect();
            outs.push(WfmOut {
                u: scale.log_r(),
                theta: branch.angle.theta(),
                u_locals,
                th_locals,
            });
        }
    }
    Ok(WfmGrid { positions, channels: cfg.channels, outs })
}

/// Per-class prototype statistics: running log-domain means per channel, the
/// shrinkage fits, the per-component shrink targets ξ, and the materialized
/// class means used at evaluation time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrototypeState {
    pub classes: usize,
    pub channels: usize,
    pub mixture_k: usize,
    pub v: f64,
    pub momentum: f64,
    pub(crate) xbar: Vec<Option<PolarComplex>>,
    pub(crate) epoch_obs: Vec<usize>,
    pub fits: Vec<Option<SureFit>>,
    /// Shrink targets per (class, component, channel) in log-coordinates.
    pub(crate) xi: Vec<Option<(f64, f64)>>,
    pub(crate) protos: Vec<Option<PolarComplex>>,
}

impl PrototypeState {
    pub fn new(cfg: &ModelConfig) -> Self {
        PrototypeState {
            classes: cfg.classes,
            channels: cfg.channels,
            mixture_k: cfg.mixture_k,
            v: cfg.v,
            momentum: cfg.momentum,
            xbar: vec![None; cfg.classes * cfg.channels],
            epoch_obs: vec![0; cfg.classes],
            fits: vec![None; cfg.classes],
            xi: vec![None; cfg.classes * cfg.mixture_k * cfg.channels],
            protos: vec![None; cfg.classes * cfg.channels],
        }
    }

    pub fn xbar(&self, class: usize, channel: usize) -> Option<PolarComplex> {
        self.xbar[class * self.channels + channel]
    }

    pub fn proto(&self, class: usize, channel: usize) -> Option<PolarComplex> {
        self.protos[class * self.channels + channel]
    }

    fn xi_index(&self, class: usize, k: usize, channel: usize) -> usize {
        (class * self.mixture_k + k) * self.channels + channel
    }

    /// Reset the per-epoch observation counters (the running means persist).
    pub fn begin_epoch(&mut self) {
        self.epoch_obs.iter_mut().for_each(|c| *c = 0);
    }

    /// Fold one batch into the running means: per class and channel, the
    /// batch Fréchet mean enters a log-domain EMA, wrap-aware on the angle.
    /// Classes absent from the batch are left unchanged.
    pub fn update_running_fm(
        &mut self,
        class_features: &BTreeMap<usize, Vec<Vec<PolarComplex>>>,
    ) -> Result<()> {
        for (&class, per_channel) in class_features {
            if class >= self.classes {
                return Err(Error::data(format!("label {class} out of range {}", self.classes)));
            }
            if per_channel.len() != self.channels {
                return Err(Error::usage("per-channel feature list has wrong channel count"));
            }
            let n_points = per_channel[0].len();
            if n_points == 0 {
                continue;
            }
            let weights = ConvexWeights::uniform(n_points)?;
            for (j, pts) in per_channel.iter().enumerate() {
                if pts.len() != n_points {
                    return Err(Error::usage("channels disagree on batch point count"));
                }
                let batch_fm = crate::frechet::wfm_c(pts, &weights)?.point;
                let slot = &mut self.xbar[class * self.channels + j];
                *slot = Some(match *slot {
                    None => batch_fm,
                    Some(old) => {
                        let m = self.momentum;
                        let u = m * old.scale.log_r() + (1.0 - m) * batch_fm.scale.log_r();
                        let delta =
                            signed_angle_diff(batch_fm.angle.theta(), old.angle.theta());
                        let theta = old.angle.theta() + (1.0 - m) * delta;
                        exp_map(&LogCoord::from_u_theta(u, theta))
                    }
                });
            }
            self.epoch_obs[class] += n_points;
        }
        Ok(())
    }

    /// Fit the shrinkage priors per class (pooling over channels) and compute
    /// the shrink targets. With v = 0 the targets are the running means.
    pub fn refresh_fits(&mut self) -> Result<()> {
        for class in 0..self.classes {
            let xbar: Option<Vec<PolarComplex>> = (0..self.channels)
                .map(|j| self.xbar[class * self.channels + j])
                .collect();
            let Some(xbar) = xbar else { continue };
            let n = self.epoch_obs[class].max(1);
            if self.v > 0.0 {
                let summary = SampleSummary::new(xbar.clone(), n)?;
                let fits = SureFit::fit(&summary, self.v, self.mixture_k)?;
                for k in 0..self.mixture_k {
                    let comp = &fits.components[k];
                    let a = comp.lambda_hat / (comp.lambda_hat + self.v);
                    for (j, x) in xbar.iter().enumerate() {
                        let lx = log_map(x);
                        let lm = log_map(&comp.mu_hat);
                        let u = a * lx.u() + (1.0 - a) * lm.u();
                        let delta = signed_angle_diff(lm.theta(), lx.theta());
                        let theta = lx.theta() + (1.0 - a) * delta;
                        let idx = self.xi_index(class, k, j);
                        self.xi[idx] = Some((u, theta));
                    }
                }
                self.fits[class] = Some(fits);
            } else {
                for k in 0..self.mixture_k {
                    for (j, x) in xbar.iter().enumerate() {
                        let l = log_map(x);
                        let idx = self.xi_index(class, k, j);
                        self.xi[idx] = Some((l.u(), l.theta()));
                    }
                }
                self.fits[class] = None;
            }
        }
        Ok(())
    }

    pub fn fitted(&self) -> bool {
        self.xi.iter().all(|x| x.is_some())
    }

    pub fn protos_ready(&self) -> bool {
        self.protos.iter().all(|p| p.is_some())
    }

    /// Use the raw running means as the saved class means (the no-shrinkage
    /// variant of the prototype layer).
    pub fn materialize_raw_running_means(&mut self) -> Result<()> {
        for (slot, xbar) in self.protos.iter_mut().zip(&self.xbar) {
            match xbar {
                Some(x) => *slot = Some(*x),
                None => {
                    return Err(Error::usage(
                        "running means not initialized for every class and channel",
                    ))
                }
            }
        }
        Ok(())
    }
}

/// Where forward passes take their prototype nodes from.
pub enum ProtoSource<'a> {
    /// No prototypes on the tape (feature-extraction passes).
    None,
    /// Training: prototypes are exp(Σₖ wₖ·ξ) with gradients into w.
    TrainTime(&'a PrototypeState),
    /// Evaluation: prototypes are the saved class means, constant.
    Frozen(&'a PrototypeState),
}

/// Tape-resident model nodes shared by every instance of a batch.
pub struct ModelVars {
    pub leaves: Vec<Var>,
    pub alphas: Vec<Vec<Var>>,
    pub alpha_weights: Vec<ConvexWeights>,
    pub mix_w: Vec<Vec<Var>>,
    pub proto_u: Vec<Var>,
    pub proto_th: Vec<Var>,
    pub proto_vals: Vec<(f64, f64)>,
}

/// Realize simplex weights and prototype nodes from the flat parameters.
pub fn build_model_vars(
    tape: &mut Tape,
    params: &[f64],
    cfg: &ModelConfig,
    source: ProtoSource<'_>,
) -> Result<ModelVars> {
    let layout = param_layout(cfg);
    if params.len() != layout.total {
        return Err(Error::usage(format!(
            "parameter vector has {} entries, layout needs {}",
            params.len(),
            layout.total
        )));
    }
    let leaves: Vec<Var> = params.iter().map(|&p| tape.leaf(p)).collect();

    let mut alphas = Vec::with_capacity(cfg.channels);
    let mut alpha_weights = Vec::with_capacity(cfg.channels);
    for j in 0..cfg.channels {
        let start = layout.wfm.start + j * cfg.window;
        let vars = tape.softmax(&leaves[start..start + cfg.window]);
        alpha_weights.push(ConvexWeights::new(vars.iter().map(|v| tape.value(*v)).collect())?);
        alphas.push(vars);
    }

    let mut mix_w = Vec::with_capacity(cfg.classes);
    for c in 0..cfg.classes {
        let start = layout.mix.start + c * cfg.mixture_k;
        mix_w.push(tape.softmax(&leaves[start..start + cfg.mixture_k]));
    }

    let mut proto_u = Vec::new();
    let mut proto_th = Vec::new();
    let mut proto_vals = Vec::new();
    match source {
        ProtoSource::None => {}
        ProtoSource::TrainTime(state) => {
            if !state.fitted() {
                return Err(Error::usage("prototype targets not fitted for this epoch"));
            }
            for c in 0..cfg.classes {
                for j in 0..cfg.channels {
                    let mut xi_u = Vec::with_capacity(cfg.mixture_k);
                    let mut xi_th = Vec::with_capacity(cfg.mixture_k);
                    for k in 0..cfg.mixture_k {
                        let (u, th) = state.xi[state.xi_index(c, k, j)]
                            .expect("fitted() checked all targets");
                        xi_u.push(u);
                        xi_th.push(th);
                    }
                    let u_node = tape.lincomb(&mix_w[c], &xi_u);
                    let raw_th: f64 = mix_w[c]
                        .iter()
                        .zip(&xi_th)
                        .map(|(w, th)| tape.value(*w) * th)
                        .sum();
                    let wrapped = AngleSO2::new(raw_th)?.theta();
                    let deps: Vec<(Var, f64)> =
                        mix_w[c].iter().cloned().zip(xi_th.iter().cloned()).collect();
                    let th_node = tape.push(wrapped, &deps);
                    proto_vals.push((tape.value(u_node), wrapped));
                    proto_u.push(u_node);
                    proto_th.push(th_node);
                }
            }
        }
        ProtoSource::Frozen(state) => {
            if !state.protos_ready() {
                return Err(Error::usage(
                    "prototypes not materialized; evaluation needs saved class means",
                ));
            }
            for p in state.protos.iter().flatten() {
                let l = log_map(p);
                proto_u.push(tape.leaf(l.u()));
                proto_th.push(tape.leaf(l.theta()));
                proto_vals.push((l.u(), l.theta()));
            }
        }
    }

    Ok(ModelVars { leaves, alphas, alpha_weights, mix_w, proto_u, proto_th, proto_vals })
}

/// Materialize the saved class means from the current mixture weights.
pub fn materialize_protos(
    state: &mut PrototypeState,
    params: &[f64],
    cfg: &ModelConfig,
) -> Result<()> {
    let mut tape = Tape::new();
    let vars = build_model_vars(&mut tape, params, cfg, ProtoSource::TrainTime(state))?;
    for (idx, &(u, th)) in vars.proto_vals.iter().enumerate() {
        state.protos[idx] = Some(exp_map(&LogCoord::from_u_theta(u, th)));
    }
    Ok(())
}

/// Min-distance features in evaluation form: for every (class, channel), the
/// smallest product-metric distance between the channel's wFM features and
/// the saved class mean. Concatenated class-major.
pub fn prototype_distance_features(
    grid: &WfmGrid,
    state: &PrototypeState,
) -> Result<Vec<f64>> {
    if !state.protos_ready() {
        return Err(Error::usage("unfitted prototypes; materialize before evaluation"));
    }
    let mut out = Vec::with_capacity(state.classes * state.channels);
    for c in 0..state.classes {
        for j in 0..state.channels {
            let proto = state.protos[c * state.channels + j].expect("checked above");
            let mut best = f64::INFINITY;
            for t in 0..grid.positions {
                let d = dist_c(&grid.point(t, j), &proto);
                if d < best {
                    best = d;
                }
            }
            out.push(best);
        }
    }
    Ok(out)
}

/// Per-instance forward output.
pub struct InstanceForward {
    pub dist_vars: Vec<Var>,
    pub logits: Vec<Var>,
}

/// Build the instance subgraph: selected wFM outputs, min-distance features,
/// and head logits.
pub fn forward_instance(
    tape: &mut Tape,
    vars: &ModelVars,
    cfg: &ModelConfig,
    signal: &[PolarComplex],
) -> Result<InstanceForward> {
    let grid = wfm_forward(signal, &vars.alpha_weights, cfg)?;
    let dist_vars = distance_feature_vars(tape, vars, cfg, &grid)?;
    let logits = head_forward(tape, &vars.leaves, cfg, &dist_vars);
    Ok(InstanceForward { dist_vars, logits })
}

/// Min-distance feature nodes. The argmin over positions is taken on raw
/// values; only the winning window per (class, channel) joins the tape.
pub fn distance_feature_vars(
    tape: &mut Tape,
    vars: &ModelVars,
    cfg: &ModelConfig,
    grid: &WfmGrid,
) -> Result<Vec<Var>> {
    if vars.proto_u.len() != cfg.feat_dim() {
        return Err(Error::usage("forward pass needs prototype nodes on the tape"));
    }
    let mut selected: Vec<Option<(Var, Var)>> = vec![None; grid.positions * cfg.channels];
    let mut dist_vars = Vec::with_capacity(cfg.feat_dim());
    for c in 0..cfg.classes {
        for j in 0..cfg.channels {
            let pid = c * cfg.channels + j;
            let (mu_u, mu_th) = vars.proto_vals[pid];
            let mut best = (f64::INFINITY, 0usize, 0.0f64, 0.0f64); // (dist, t, du, dth)
            for t in 0..grid.positions {
                let o = grid.at(t, j);
                let du = o.u - mu_u;
                let dth = signed_angle_diff(o.theta, mu_th);
                let d = (du * du + 2.0 * dth * dth).sqrt();
                if d < best.0 {
                    best = (d, t, du, dth);
                }
            }
            let (_, t_star, _, dth) = best;
            let cache = &mut selected[t_star * cfg.channels + j];
            let (u_node, th_node) = match cache {
                Some(pair) => *pair,
                None => {
                    let o = grid.at(t_star, j);
                    let u_node = {
                        let deps: Vec<(Var, f64)> = vars.alphas[j]
                            .iter()
                            .cloned()
                            .zip(o.u_locals.iter().cloned())
                            .collect();
                        tape.push(o.u, &deps)
                    };
                    let th_node = {
                        let deps: Vec<(Var, f64)> = vars.alphas[j]
                            .iter()
                            .cloned()
                            .zip(o.th_locals.iter().cloned())
                            .collect();
                        tape.push(o.theta, &deps)
                    };
                    *cache = Some((u_node, th_node));
                    (u_node, th_node)
                }
            };
            let du_node = tape.sub(u_node, vars.proto_u[pid]);
            let dth_node = tape.push(dth, &[(th_node, 1.0), (vars.proto_th[pid], -1.0)]);
            let du2 = tape.mul(du_node, du_node);
            let dth2 = tape.mul(dth_node, dth_node);
            let inner = tape.lincomb(&[du2, dth2], &[1.0, 2.0]);
            dist_vars.push(tape.sqrt(inner));
        }
    }
    Ok(dist_vars)
}

/// 1-D convolution (stride 1) + ReLU, one hidden fully-connected layer +
/// ReLU, and a linear output layer.
pub fn head_forward(tape: &mut Tape, leaves: &[Var], cfg: &ModelConfig, input: &[Var]) -> Vec<Var> {
    let layout = param_layout(cfg);
    let t_out = cfg.conv_out_len();
    let mut conv_flat = Vec::with_capacity(cfg.conv_out_total());
    for f in 0..cfg.conv_filters {
        let w_start = layout.conv_w.start + f * cfg.conv_width;
        let w_row = &leaves[w_start..w_start + cfg.conv_width];
        let bias = leaves[layout.conv_b.start + f];
        for t in 0..t_out {
            let pre = tape.dot_bias(w_row, &input[t..t + cfg.conv_width], bias);
            conv_flat.push(tape.relu(pre));
        }
    }
    let mut hidden = Vec::with_capacity(cfg.hidden);
    for h in 0..cfg.hidden {
        let w_start = layout.fc1_w.start + h * cfg.conv_out_total();
        let w_row = &leaves[w_start..w_start + cfg.conv_out_total()];
        let bias = leaves[layout.fc1_b.start + h];
        let pre = tape.dot_bias(w_row, &conv_flat, bias);
        hidden.push(tape.relu(pre));
    }
    let mut logits = Vec::with_capacity(cfg.classes);
    for c in 0..cfg.classes {
        let w_start = layout.fc2_w.start + c * cfg.hidden;
        let w_row = &leaves[w_start..w_start + cfg.hidden];
        let bias = leaves[layout.fc2_b.start + c];
        logits.push(tape.dot_bias(w_row, &hidden, bias));
    }
    logits
}
