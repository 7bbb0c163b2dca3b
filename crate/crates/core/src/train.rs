//! Run orchestration: dataset generation, encoder pre-training, the
//! self-training loop with routing and sparse optimization, evaluation, and
//! ablation sweeps.
//!
//! Every run is a pure function of its [`RunConfig`]: all randomness flows
//! from the run seed through purpose-specific streams, so identical configs
//! produce byte-identical logs, checkpoints and reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{fit_kmeans, ClusterRouter};
use crate::error::{EditKitError, Result};
use crate::loss::{pipeline_step, LossWeights};
use crate::metrics::{pair_metrics, CellMetrics, MetricConfig, MetricReport};
use crate::model::{EditModel, EditRequest};
use crate::nn::GradRecord;
use crate::sparse::{
    GroupPartition, ShrinkRecord, SparseOptConfig, SparseOptimizer, SparsityReport,
};
use crate::world::{attribute_codebook, AttributeCodebook, Dataset, WorldSpec};

/// Component toggles: self-training, the semantic-disentangled architecture,
/// and sparse learning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toggles {
    pub self_training: bool,
    pub sda: bool,
    pub sparse_learning: bool,
}

impl Toggles {
    pub const BASELINE: Toggles =
        Toggles { self_training: false, sda: false, sparse_learning: false };
    pub const ST: Toggles = Toggles { self_training: true, sda: false, sparse_learning: false };
    pub const ST_SDA: Toggles = Toggles { self_training: true, sda: true, sparse_learning: false };
    pub const FULL: Toggles = Toggles { self_training: true, sda: true, sparse_learning: true };

    pub fn label(&self) -> String {
        if !self.self_training {
            return "baseline".into();
        }
        let mut s = "+ST".to_string();
        if self.sda {
            s.push_str("+SDA");
        }
        if self.sparse_learning {
            s.push_str("+SL");
        }
        s
    }
}

/// Attribute split for the unseen-edit protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeenUnseenSplit {
    pub seen: Vec<usize>,
    pub unseen: Vec<usize>,
}

impl SeenUnseenSplit {
    /// Holds out every fourth attribute, giving a 3:1 seen/unseen ratio.
    pub fn three_to_one(num_attributes: usize) -> SeenUnseenSplit {
        let unseen: Vec<usize> = (3..num_attributes).step_by(4).collect();
        let seen: Vec<usize> =
            (0..num_attributes).filter(|j| !unseen.contains(j)).collect();
        SeenUnseenSplit { seen, unseen }
    }

    pub fn validate(&self, num_attributes: usize) -> Result<()> {
        let mut all: Vec<usize> = self.seen.iter().chain(self.unseen.iter()).copied().collect();
        all.sort_unstable();
        let expect: Vec<usize> = (0..num_attributes).collect();
        if all != expect {
            return Err(EditKitError::Config(
                "seen/unseen split must partition the attribute indices".into(),
            ));
        }
        if self.seen.is_empty() {
            return Err(EditKitError::Config("split needs at least one seen attribute".into()));
        }
        Ok(())
    }
}

fn default_k() -> usize {
    5
}
fn default_steps() -> usize {
    20000
}
fn default_pretrain_steps() -> usize {
    3000
}
fn default_val_every() -> usize {
    1000
}
fn default_hidden() -> usize {
    96
}
fn default_learning_rate() -> f64 {
    0.005
}
fn default_pretrain_lr() -> f64 {
    0.003
}
fn default_momentum() -> f64 {
    0.9
}
fn default_warmup_frac() -> f64 {
    0.3
}
fn default_rho() -> f64 {
    0.02
}
fn default_lambda0() -> f64 {
    1e-3
}
fn default_eta() -> f64 {
    2.0
}
fn default_max_trials() -> usize {
    20
}
fn default_eps_proj() -> f64 {
    1e-6
}
fn default_codebook_noise() -> f64 {
    0.02
}
fn default_eval_gammas() -> Vec<f64> {
    vec![1.0]
}
fn default_toggles() -> Toggles {
    Toggles::FULL
}
fn default_kmeans_max_iter() -> usize {
    100
}

/// Complete configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub world: WorldSpec,
    #[serde(default)]
    pub weights: LossWeights,
    /// Number of cluster transformations (forced to 1 when `sda` is off).
    #[serde(default = "default_k")]
    pub k: usize,
    /// Fraction of eligible groups to zero (forced to 0 when `sparse_learning`
    /// is off).
    #[serde(default = "default_sparsity_rate")]
    pub sparsity_rate: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_pretrain_steps")]
    pub pretrain_steps: usize,
    #[serde(default = "default_val_every")]
    pub val_every: usize,
    pub seed: u64,
    #[serde(default = "default_toggles")]
    pub toggles: Toggles,
    #[serde(default)]
    pub split: Option<SeenUnseenSplit>,
    #[serde(default = "default_codebook_noise")]
    pub codebook_noise: f64,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_pretrain_lr")]
    pub pretrain_lr: f64,
    #[serde(default = "default_momentum")]
    pub momentum: f64,
    #[serde(default = "default_warmup_frac")]
    pub warmup_frac: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_max_trials")]
    pub max_trials: usize,
    #[serde(default = "default_eps_proj")]
    pub eps_proj: f64,
    #[serde(default)]
    pub metric: MetricConfig,
    #[serde(default = "default_eval_gammas")]
    pub eval_gammas: Vec<f64>,
    /// Encoder stays frozen after pre-training unless set.
    #[serde(default)]
    pub train_encoder: bool,
    #[serde(default = "default_kmeans_max_iter")]
    pub kmeans_max_iter: usize,
}

fn default_sparsity_rate() -> f64 {
    0.1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            world: WorldSpec::default(),
            weights: LossWeights::default(),
            k: default_k(),
            sparsity_rate: default_sparsity_rate(),
            steps: default_steps(),
            pretrain_steps: default_pretrain_steps(),
            val_every: default_val_every(),
            seed: 7,
            toggles: default_toggles(),
            split: None,
            codebook_noise: default_codebook_noise(),
            hidden: default_hidden(),
            learning_rate: default_learning_rate(),
            pretrain_lr: default_pretrain_lr(),
            momentum: default_momentum(),
            warmup_frac: default_warmup_frac(),
            rho: default_rho(),
            lambda0: default_lambda0(),
            eta: default_eta(),
            max_trials: default_max_trials(),
            eps_proj: default_eps_proj(),
            metric: MetricConfig::default(),
            eval_gammas: default_eval_gammas(),
            train_encoder: false,
            kmeans_max_iter: default_kmeans_max_iter(),
        }
    }
}

impl RunConfig {
    /// Applies the toggle composition rules and validates everything.
    /// `sda = false` forces `k = 1`; `sparse_learning = false` forces the
    /// sparsity rate to 0; SDA or SL without self-training is an error.
    pub fn normalized(&self) -> Result<RunConfig> {
        let mut cfg = self.clone();
        if !cfg.toggles.self_training && (cfg.toggles.sda || cfg.toggles.sparse_learning) {
            return Err(EditKitError::Config(
                "sda/sparse_learning toggles require self_training".into(),
            ));
        }
        if !cfg.toggles.sda {
            cfg.k = 1;
        }
        if !cfg.toggles.sparse_learning {
            cfg.sparsity_rate = 0.0;
        }
        cfg.world.validate()?;
        cfg.weights.validate()?;
        if cfg.k == 0 || cfg.k > cfg.world.num_attributes {
            return Err(EditKitError::Config(format!(
                "k = {} must be in 1..={}",
                cfg.k, cfg.world.num_attributes
            )));
        }
        if let Some(split) = &cfg.split {
            split.validate(cfg.world.num_attributes)?;
        }
        if cfg.val_every == 0 {
            return Err(EditKitError::Config("val_every must be positive".into()));
        }
        if cfg.eval_gammas.is_empty()
            || cfg.eval_gammas.iter().any(|g| !(0.0..=1.0).contains(g))
        {
            return Err(EditKitError::Config("eval gammas must be in [0, 1]".into()));
        }
        cfg.sparse_opt_config().validate()?;
        Ok(cfg)
    }

    pub fn sparse_opt_config(&self) -> SparseOptConfig {
        SparseOptConfig {
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            warmup_steps: (self.warmup_frac * self.steps as f64).floor() as usize,
            sparsity_rate: self.sparsity_rate,
            rho: self.rho,
            lambda0: self.lambda0,
            eta: self.eta,
            max_trials: self.max_trials,
            eps_proj: self.eps_proj,
        }
    }

    /// Attribute indices sampled during self-training.
    pub fn seen_attrs(&self) -> Vec<usize> {
        match &self.split {
            Some(s) => s.seen.clone(),
            None => (0..self.world.num_attributes).collect(),
        }
    }
}

/// Purpose-separated RNG stream derived from the run seed.
pub fn derive_rng(seed: u64, purpose: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in purpose.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// One row of the training-loss log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLogRow {
    pub step: usize,
    pub attr: usize,
    pub gamma: f64,
    pub l_id: f64,
    pub l_faith: f64,
    pub l_gen: f64,
    pub l_overall: f64,
}

/// One validation measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValRow {
    pub step: usize,
    pub l_overall: f64,
    pub cardinality_ok: bool,
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config: RunConfig,
    pub model: EditModel,
    pub report: MetricReport,
    pub sparsity: Option<SparsityReport>,
    pub train_log: Vec<TrainLogRow>,
    pub val_log: Vec<ValRow>,
    pub sparsity_trace: Vec<ShrinkRecord>,
    pub pretrain_log: Vec<PretrainRow>,
    pub best_val: Option<(usize, f64)>,
}

/// One pre-training measurement: reconstruction and latent-alignment MSE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PretrainRow {
    pub step: usize,
    pub recon_mse: f64,
    pub align_mse: f64,
}

/// Pre-training of encoder and decoder: reconstruction MSE plus a
/// latent-alignment MSE anchoring `E(f)` to the world's semantic
/// coordinates, optimized with Adam under a cosine learning-rate decay from
/// `lr` to `lr / 100`.
///
/// The alignment term stands in for the semantically pre-trained feature
/// extractors real editing pipelines start from: attribute embeddings only
/// mean something in the encoder's latent space if that space is anchored to
/// the semantic one. Pre-training is plumbing that produces the "given"
/// checkpoint; the momentum-SGD contract of [`SparseOptimizer`] governs the
/// self-training phase.
pub fn pretrain(
    model: &mut EditModel,
    ds: &Dataset,
    steps: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<PretrainRow>> {
    let samples: Vec<(&Vec<f64>, &Vec<f64>)> = ds
        .videos
        .train
        .iter()
        .flat_map(|v| v.frames.iter().zip(v.true_latents.iter()))
        .collect();
    if samples.is_empty() {
        return Err(EditKitError::Data("no training frames".into()));
    }
    let mut params = model.encoder.param_ids();
    params.extend(model.decoder.param_ids());
    let mut m1 = GradRecord::zeros_like(&model.store);
    let mut m2 = GradRecord::zeros_like(&model.store);
    let mut grads = GradRecord::zeros_like(&model.store);
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let mut log = Vec::new();
    for step in 1..=steps {
        let (f, z_true) = samples[rng.random_range(0..samples.len())];
        grads.fill_zero();
        let x = model.encode(f)?;
        let recon = model.decode(&x)?;
        let n = f.len() as f64;
        let recon_mse: f64 =
            f.iter().zip(recon.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
        let align_mse: f64 =
            x.iter().zip(z_true.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
                / x.len() as f64;
        let cot_recon: Vec<f64> =
            recon.iter().zip(f.iter()).map(|(r, a)| 2.0 * (r - a) / n).collect();
        let mut cot_x = model.decoder.backward_into(&model.store, &x, &cot_recon, &mut grads)?;
        for (c, (xi, zi)) in cot_x.iter_mut().zip(x.iter().zip(z_true.iter())) {
            *c += 2.0 * (xi - zi) / x.len() as f64;
        }
        model.encoder.backward_into(&model.store, f, &cot_x, &mut grads)?;
        if !grads.is_finite() {
            return Err(EditKitError::Numeric("non-finite pretrain gradient".into()));
        }
        let progress = (step - 1) as f64 / steps.max(1) as f64;
        let alpha = lr / 100.0
            + (lr - lr / 100.0) * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos());
        let bc1 = 1.0 - beta1.powi(step as i32);
        let bc2 = 1.0 - beta2.powi(step as i32);
        for &p in &params {
            let g = grads.mat(p).data.clone();
            let m = &mut m1.mat_mut(p).data;
            for i in 0..g.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            }
            let v = &mut m2.mat_mut(p).data;
            for i in 0..g.len() {
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            }
            let m = m1.mat(p).data.clone();
            let v = m2.mat(p).data.clone();
            let theta = &mut model.store.param_mut(p)?.data;
            for i in 0..g.len() {
                let mhat = m[i] / bc1;
                let vhat = v[i] / bc2;
                theta[i] -= alpha * mhat / (vhat.sqrt() + eps);
            }
        }
        log.push(PretrainRow { step, recon_mse, align_mse });
    }
    Ok(log)
}

/// Deterministic validation loss: every validation frame, attributes cycled
/// round-robin over the seen set, fixed edit scale 0.5.
fn validation_loss(
    model: &EditModel,
    ds: &Dataset,
    codebook: &AttributeCodebook,
    seen: &[usize],
    weights: &LossWeights,
) -> Result<f64> {
    let videos = if ds.videos.val.is_empty() { &ds.videos.train } else { &ds.videos.val };
    let mut total = 0.0;
    let mut count = 0usize;
    for (vi, video) in videos.iter().enumerate() {
        for (t, frame) in video.frames.iter().enumerate() {
            let attr = seen[(vi * video.frames.len() + t) % seen.len()];
            let req = EditRequest::new(codebook.embeddings[attr].clone(), 0.5, 1.0)?;
            let out = pipeline_step(model, &ds.ground_truth, frame, attr, &req, weights, None, false)?;
            total += out.breakdown.l_overall;
            count += 1;
        }
    }
    Ok(total / count.max(1) as f64)
}

/// Runs the full pipeline on a freshly generated dataset.
pub fn train(cfg: &RunConfig) -> Result<RunArtifacts> {
    let cfg = cfg.normalized()?;
    let ds = Dataset::generate(&cfg.world)?;
    train_on(&cfg, &ds)
}

/// Runs pre-training, norm-stat fitting, routing, the self-training loop and
/// evaluation against an existing dataset.
pub fn train_on(cfg: &RunConfig, ds: &Dataset) -> Result<RunArtifacts> {
    let cfg = cfg.normalized()?;
    let gt = &ds.ground_truth;
    let d = cfg.world.latent_dim;
    let mut model = EditModel::build(
        d,
        d,
        cfg.hidden,
        cfg.k,
        cfg.world.region_count,
        &mut derive_rng(cfg.seed, "init"),
    )?;

    let pretrain_log = pretrain(
        &mut model,
        ds,
        cfg.pretrain_steps,
        cfg.pretrain_lr,
        &mut derive_rng(cfg.seed, "pretrain"),
    )?;

    let frames: Vec<Vec<f64>> = ds.train_frames().cloned().collect();
    model.fit_norm_stats(frames.iter())?;

    let codebook = attribute_codebook(gt, cfg.codebook_noise, cfg.seed ^ 0xC0DE_B00C);
    let seen = cfg.seen_attrs();
    let router = if cfg.toggles.sda {
        let seen_embeddings: Vec<Vec<f64>> =
            seen.iter().map(|&j| codebook.embeddings[j].clone()).collect();
        fit_kmeans(&seen_embeddings, cfg.k, cfg.seed ^ 0x5EED, cfg.kmeans_max_iter)?
    } else {
        let all: Vec<Vec<f64>> =
            seen.iter().map(|&j| codebook.embeddings[j].clone()).collect();
        ClusterRouter::degenerate(&all)?
    };
    model.attach_router(router)?;

    let mut train_log = Vec::new();
    let mut val_log = Vec::new();
    let mut sparsity_trace: Vec<ShrinkRecord> = Vec::new();
    let mut sparsity = None;
    let mut best: Option<(usize, f64, EditModel)> = None;

    if cfg.toggles.self_training {
        let mut trainable = model.decoder_groups()?;
        if cfg.train_encoder {
            trainable.extend(model.encoder_groups()?);
        }
        let eligible = model.bank_region_groups()?;
        trainable.extend(eligible.iter().copied());
        let partition = GroupPartition::new(trainable, eligible)?;
        let mut opt = SparseOptimizer::new(&model.store, partition, cfg.sparse_opt_config())?;

        let mut rng = derive_rng(cfg.seed, "train");
        let mut grads = GradRecord::zeros_like(&model.store);
        let train_videos = &ds.videos.train;
        for step in 1..=cfg.steps {
            let video = &train_videos[rng.random_range(0..train_videos.len())];
            let frame = &video.frames[rng.random_range(0..video.frames.len())];
            let attr = seen[rng.random_range(0..seen.len())];
            let gamma: f64 = rng.random_range(0.0..1.0);
            let req = EditRequest::new(codebook.embeddings[attr].clone(), gamma, 1.0)?;
            grads.fill_zero();
            let out = pipeline_step(
                &model,
                gt,
                frame,
                attr,
                &req,
                &cfg.weights,
                Some(&mut grads),
                cfg.train_encoder,
            )?;
            let report = opt.step(&mut model.store, &grads)?;
            sparsity_trace.extend(report.shrinks);
            train_log.push(TrainLogRow {
                step,
                attr,
                gamma,
                l_id: out.breakdown.l_id,
                l_faith: out.breakdown.l_faith,
                l_gen: out.breakdown.l_gen,
                l_overall: out.breakdown.l_overall,
            });
            if step % cfg.val_every == 0 || step == cfg.steps {
                let vloss = validation_loss(&model, ds, &codebook, &seen, &cfg.weights)?;
                let ok = opt.cardinality_satisfied();
                val_log.push(ValRow { step, l_overall: vloss, cardinality_ok: ok });
                if ok && best.as_ref().is_none_or(|(_, b, _)| vloss < *b) {
                    best = Some((step, vloss, model.clone()));
                }
            }
        }
        let report = opt.finalize(&mut model.store)?;
        // The finalized iterate competes too if it meets the constraint.
        if report.satisfied {
            let vloss = validation_loss(&model, ds, &codebook, &seen, &cfg.weights)?;
            if best.as_ref().is_none_or(|(_, b, _)| vloss < *b) {
                best = Some((cfg.steps, vloss, model.clone()));
            }
        }
        sparsity = Some(report);
    }

    let (best_val, final_model) = match best {
        Some((step, vloss, m)) => (Some((step, vloss)), m),
        None => (None, model),
    };

    let report = evaluate(&final_model, ds, &codebook, cfg.split.as_ref(), &cfg.eval_gammas, &cfg.metric)?;

    Ok(RunArtifacts {
        config: cfg,
        model: final_model,
        report,
        sparsity,
        train_log,
        val_log,
        sparsity_trace,
        pretrain_log,
        best_val,
    })
}

/// Evaluates a model on the validation videos: every attribute at every
/// requested edit scale, seen/unseen aggregates when a split is given.
pub fn evaluate(
    model: &EditModel,
    ds: &Dataset,
    codebook: &AttributeCodebook,
    split: Option<&SeenUnseenSplit>,
    gammas: &[f64],
    metric_cfg: &MetricConfig,
) -> Result<MetricReport> {
    let gt = &ds.ground_truth;
    if codebook.len() != gt.num_attributes() {
        return Err(EditKitError::Config(format!(
            "codebook has {} embeddings for {} attributes",
            codebook.len(),
            gt.num_attributes()
        )));
    }
    let videos = if ds.videos.val.is_empty() { &ds.videos.train } else { &ds.videos.val };
    let mut cells = Vec::new();
    for video in videos {
        for attr in 0..gt.num_attributes() {
            let seen = split.map(|s| s.seen.contains(&attr)).unwrap_or(true);
            for &gamma in gammas {
                let req = EditRequest::new(codebook.embeddings[attr].clone(), gamma, 1.0)?;
                let mut edited = Vec::with_capacity(video.frames.len());
                for frame in &video.frames {
                    let x = model.encode(frame)?;
                    let x_hat = model.pseudo_edit(&x, &req)?;
                    edited.push(model.decode(&x_hat)?);
                }
                let pm = pair_metrics(gt, video, &edited, attr, req.sign, metric_cfg)?;
                cells.push(CellMetrics {
                    video_id: video.video_id,
                    attr,
                    gamma,
                    sign: req.sign,
                    seen,
                    values: pm.values,
                    skipped_pairs: pm.skipped_pairs,
                    flagged_ratios: pm.flagged_ratios,
                });
            }
        }
    }
    Ok(MetricReport::from_cells(cells, *metric_cfg))
}

/// Evaluates a stored checkpoint exactly as `train_on` would have, rebuilding
/// the codebook from the run config.
pub fn evaluate_checkpoint(
    model: &EditModel,
    ds: &Dataset,
    cfg: &RunConfig,
) -> Result<MetricReport> {
    let cfg = cfg.normalized()?;
    let codebook = attribute_codebook(&ds.ground_truth, cfg.codebook_noise, cfg.seed ^ 0xC0DE_B00C);
    evaluate(model, ds, &codebook, cfg.split.as_ref(), &cfg.eval_gammas, &cfg.metric)
}

/// Which ablation grid to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AblationKind {
    Components,
    Clusters,
    Sparsity,
    Unseen,
}

impl std::str::FromStr for AblationKind {
    type Err = EditKitError;

    fn from_str(s: &str) -> Result<AblationKind> {
        match s {
            "components" => Ok(AblationKind::Components),
            "clusters" => Ok(AblationKind::Clusters),
            "sparsity" => Ok(AblationKind::Sparsity),
            "unseen" => Ok(AblationKind::Unseen),
            other => Err(EditKitError::Config(format!("unknown ablation kind {other}"))),
        }
    }
}

/// One ablation row: label, variant config, and its artifacts.
pub struct AblationRow {
    pub label: String,
    pub artifacts: RunArtifacts,
}

/// Builds the config grid for one ablation kind.
pub fn ablation_grid(kind: AblationKind, base: &RunConfig) -> Vec<(String, RunConfig)> {
    let mut rows = Vec::new();
    match kind {
        AblationKind::Components => {
            for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
                let mut cfg = base.clone();
                cfg.toggles = toggles;
                rows.push((toggles.label(), cfg));
            }
        }
        AblationKind::Clusters => {
            let mut cfg = base.clone();
            cfg.toggles = Toggles::BASELINE;
            rows.push(("baseline".into(), cfg));
            for k in [2usize, 3, 5, 10] {
                let mut cfg = base.clone();
                cfg.toggles = Toggles::ST_SDA;
                cfg.k = k;
                rows.push((format!("K={k}"), cfg));
            }
        }
        AblationKind::Sparsity => {
            for q in [0.0, 0.1, 0.3, 0.5] {
                let mut cfg = base.clone();
                cfg.toggles = if q > 0.0 { Toggles::FULL } else { Toggles::ST_SDA };
                cfg.sparsity_rate = q;
                rows.push((format!("q={q}"), cfg));
            }
        }
        AblationKind::Unseen => {
            for toggles in [Toggles::BASELINE, Toggles::FULL] {
                let mut cfg = base.clone();
                cfg.toggles = toggles;
                if cfg.split.is_none() {
                    cfg.split = Some(SeenUnseenSplit::three_to_one(cfg.world.num_attributes));
                }
                rows.push((toggles.label(), cfg));
            }
        }
    }
    rows
}

/// Runs an ablation grid. Cells share the base seed and dataset and run in
/// parallel; each cell is individually deterministic.
pub fn ablate(kind: AblationKind, base: &RunConfig) -> Result<Vec<AblationRow>> {
    let grid = ablation_grid(kind, base);
    let results: Vec<Result<AblationRow>> = grid
        .into_par_iter()
        .map(|(label, cfg)| {
            let artifacts = train(&cfg)?;
            Ok(AblationRow { label, artifacts })
        })
        .collect();
    results.into_iter().collect()
}

/// Renders ablation rows as the five-metric table CSV.
pub fn ablation_csv(kind: AblationKind, rows: &[AblationRow]) -> String {
    let mut out = String::from("variant,tl_id,tg_id,id_preserve,tacr,napr\n");
    for row in rows {
        if kind == AblationKind::Unseen {
            let rep = &row.artifacts.report;
            if let (Some(seen), Some(unseen)) = (&rep.seen, &rep.unseen) {
                out.push_str(&format!("{}[seen],{}\n", row.label, seen.csv_row()));
                out.push_str(&format!("{}[unseen],{}\n", row.label, unseen.csv_row()));
                continue;
            }
        }
        out.push_str(&format!(
            "{},{}\n",
            row.label,
            row.artifacts.report.aggregate.csv_row()
        ));
    }
    out
}

/// Writes all artifacts of a finished run into a directory:
/// config snapshot, checkpoint, CSV logs, JSON reports, and gnuplot-ready
/// `.dat` curves.
pub fn write_run_dir(dir: &std::path::Path, artifacts: &RunArtifacts) -> Result<()> {
    use std::fmt::Write as _;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.json"), serde_json::to_string_pretty(&artifacts.config)?)?;
    artifacts.model.save(&dir.join("checkpoint.json"))?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&artifacts.report)?)?;
    if let Some(sp) = &artifacts.sparsity {
        std::fs::write(dir.join("sparsity.json"), serde_json::to_string_pretty(sp)?)?;
    }

    let mut train_csv = String::from("step,attr,gamma,l_id,l_faith,l_gen,l_overall\n");
    for r in &artifacts.train_log {
        writeln!(
            train_csv,
            "{},{},{},{},{},{},{}",
            r.step, r.attr, r.gamma, r.l_id, r.l_faith, r.l_gen, r.l_overall
        )
        .unwrap();
    }
    std::fs::write(dir.join("train_log.csv"), train_csv)?;

    let mut trace_csv = String::from("step,group,name,pre_norm,post_norm,lambda,flagged,frozen\n");
    for r in &artifacts.sparsity_trace {
        writeln!(
            trace_csv,
            "{},{},{},{},{},{},{},{}",
            r.step, r.group, r.group_name, r.pre_norm, r.post_norm, r.lambda, r.flagged, r.frozen
        )
        .unwrap();
    }
    std::fs::write(dir.join("sparsity_trace.csv"), trace_csv)?;

    let mut report_csv = String::from("tl_id,tg_id,id_preserve,tacr,napr\n");
    report_csv.push_str(&artifacts.report.aggregate.csv_row());
    report_csv.push('\n');
    std::fs::write(dir.join("report_row.csv"), report_csv)?;

    let curves = dir.join("curves");
    std::fs::create_dir_all(&curves)?;
    let mut loss_dat = String::from("# step l_id l_faith l_gen l_overall\n");
    for r in &artifacts.train_log {
        writeln!(loss_dat, "{} {} {} {} {}", r.step, r.l_id, r.l_faith, r.l_gen, r.l_overall)
            .unwrap();
    }
    std::fs::write(curves.join("loss.dat"), loss_dat)?;
    let mut val_dat = String::from("# step val_overall cardinality_ok\n");
    for r in &artifacts.val_log {
        writeln!(val_dat, "{} {} {}", r.step, r.l_overall, u8::from(r.cardinality_ok)).unwrap();
    }
    std::fs::write(curves.join("validation.dat"), val_dat)?;
    let mut pre_dat = String::from("# step recon_mse align_mse\n");
    for r in &artifacts.pretrain_log {
        writeln!(pre_dat, "{} {} {}", r.step, r.recon_mse, r.align_mse).unwrap();
    }
    std::fs::write(curves.join("pretrain.dat"), pre_dat)?;
    Ok(())
}
