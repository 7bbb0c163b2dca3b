//! The editable generator: encoder, decoder, normalization statistics, and a
//! bank of cluster transformations.
//!
//! A pseudo-edit shifts a normalized latent along an attribute embedding and
//! hands the denormalized result to the transformation of the embedding's
//! cluster:
//!
//! ```text
//! x_hat = T_k(denormalize(normalize(x) + gamma * sign * a)),  k = route(a)
//! ```
//!
//! Transformations are residual (`T_k(z) = z + N_k(z)`) with `N_k` a
//! single affine layer whose rows are grouped by latent region, so zeroing a
//! region group makes that region pass through unchanged.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterRouter;
use crate::error::{EditKitError, Result};
use crate::nn::{Activation, DenseNet, Grouping, ParamStore};
use crate::world::{Latent, Observation};

/// Frozen per-dimension standardization statistics of encoder outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Standard deviations are floored here so normalization never divides by
/// zero.
pub const STD_FLOOR: f64 = 1e-6;

impl NormStats {
    /// Population mean/std per dimension, std floored at [`STD_FLOOR`].
    pub fn fit(latents: &[Vec<f64>]) -> Result<NormStats> {
        if latents.is_empty() {
            return Err(EditKitError::Data("cannot fit norm stats on an empty dataset".into()));
        }
        let d = latents[0].len();
        let n = latents.len() as f64;
        let mut mean = vec![0.0; d];
        for l in latents {
            for (m, v) in mean.iter_mut().zip(l.iter()) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for l in latents {
            for ((v, x), m) in var.iter_mut().zip(l.iter()).zip(mean.iter()) {
                let dlt = x - m;
                *v += dlt * dlt;
            }
        }
        let std = var.iter().map(|v| (v / n).sqrt().max(STD_FLOOR)).collect();
        Ok(NormStats { mean, std })
    }

    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter())
            .zip(self.std.iter())
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn denormalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(self.mean.iter())
            .zip(self.std.iter())
            .map(|((v, m), s)| v * s + m)
            .collect()
    }
}

/// One edit request: an attribute embedding, an edit scale in `[0, 1]`, and a
/// direction sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditRequest {
    pub embedding: Vec<f64>,
    pub gamma: f64,
    pub sign: f64,
}

impl EditRequest {
    pub fn new(embedding: Vec<f64>, gamma: f64, sign: f64) -> Result<EditRequest> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(EditKitError::Config(format!("edit scale {gamma} outside [0, 1]")));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(EditKitError::Config(format!("direction sign {sign} must be +1 or -1")));
        }
        Ok(EditRequest { embedding, gamma, sign })
    }
}

/// Encoder, decoder, residual transform bank, and routing state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EditModel {
    pub store: ParamStore,
    pub encoder: DenseNet,
    pub decoder: DenseNet,
    /// Residual nets; `T_k(z) = z + bank[k](z)`.
    pub bank: Vec<DenseNet>,
    pub norm: Option<NormStats>,
    pub router: Option<ClusterRouter>,
    pub obs_dim: usize,
    pub latent_dim: usize,
    pub region_count: usize,
}

/// Residual-bank weights start near zero so the untrained bank is close to
/// the identity map.
pub const BANK_INIT_SCALE: f64 = 0.01;

impl EditModel {
    /// Builds the standard architecture: a linear encoder, a tanh-hidden
    /// decoder, and `k` single-layer residual transforms grouped into
    /// `region_count` row blocks each.
    ///
    /// The encoder is a single affine layer so additive latent edits act
    /// consistently across the whole observation manifold; the decoder
    /// carries the nonlinearity.
    pub fn build(
        obs_dim: usize,
        latent_dim: usize,
        hidden: usize,
        k: usize,
        region_count: usize,
        rng: &mut impl Rng,
    ) -> Result<EditModel> {
        if k == 0 {
            return Err(EditKitError::Config("transform bank cannot be empty".into()));
        }
        let mut store = ParamStore::new();
        let encoder = DenseNet::build(
            &mut store,
            "enc",
            &[obs_dim, latent_dim],
            &[Activation::Identity],
            Grouping::PerLayer,
            1.0,
            rng,
        )?;
        let decoder = DenseNet::build(
            &mut store,
            "dec",
            &[latent_dim, hidden, obs_dim],
            &[Activation::Tanh, Activation::Identity],
            Grouping::PerLayer,
            1.0,
            rng,
        )?;
        let mut bank = Vec::with_capacity(k);
        for i in 0..k {
            bank.push(DenseNet::build(
                &mut store,
                &format!("bank{i}"),
                &[latent_dim, latent_dim],
                &[Activation::Identity],
                Grouping::OutputRegions(region_count),
                BANK_INIT_SCALE,
                rng,
            )?);
        }
        store.validate_partition()?;
        Ok(EditModel {
            store,
            encoder,
            decoder,
            bank,
            norm: None,
            router: None,
            obs_dim,
            latent_dim,
            region_count,
        })
    }

    pub fn encode(&self, frame: &[f64]) -> Result<Latent> {
        self.encoder.forward(&self.store, frame)
    }

    pub fn decode(&self, latent: &[f64]) -> Result<Observation> {
        self.decoder.forward(&self.store, latent)
    }

    /// Fits normalization statistics from encoded training frames. Stats are
    /// frozen afterwards; refitting is a state error.
    pub fn fit_norm_stats<'a>(
        &mut self,
        frames: impl IntoIterator<Item = &'a Observation>,
    ) -> Result<()> {
        if self.norm.is_some() {
            return Err(EditKitError::State("norm stats already fitted".into()));
        }
        let mut latents = Vec::new();
        for f in frames {
            latents.push(self.encode(f)?);
        }
        self.norm = Some(NormStats::fit(&latents)?);
        Ok(())
    }

    pub fn attach_router(&mut self, router: ClusterRouter) -> Result<()> {
        if router.k != self.bank.len() {
            return Err(EditKitError::Config(format!(
                "router has {} clusters but bank has {} transforms",
                router.k,
                self.bank.len()
            )));
        }
        self.router = Some(router);
        Ok(())
    }

    fn norm_stats(&self) -> Result<&NormStats> {
        self.norm
            .as_ref()
            .ok_or_else(|| EditKitError::State("norm stats not fitted".into()))
    }

    pub fn router_ref(&self) -> Result<&ClusterRouter> {
        self.router
            .as_ref()
            .ok_or_else(|| EditKitError::State("router not fitted".into()))
    }

    /// Routes a request and computes the pre-transform latent
    /// `denormalize(normalize(x) + gamma * sign * a)`.
    pub fn routed_edit(&self, x: &[f64], req: &EditRequest) -> Result<(usize, Latent)> {
        if !(0.0..=1.0).contains(&req.gamma) {
            return Err(EditKitError::Config(format!("edit scale {} outside [0, 1]", req.gamma)));
        }
        if x.len() != self.latent_dim || req.embedding.len() != self.latent_dim {
            return Err(EditKitError::Shape(format!(
                "routed_edit: latent dim {} / embedding dim {} vs model dim {}",
                x.len(),
                req.embedding.len(),
                self.latent_dim
            )));
        }
        let stats = self.norm_stats()?;
        let k = self.router_ref()?.route(&req.embedding)?;
        let mut shifted = stats.normalize(x);
        for (s, a) in shifted.iter_mut().zip(req.embedding.iter()) {
            *s += req.gamma * req.sign * a;
        }
        Ok((k, stats.denormalize(&shifted)))
    }

    /// Residual transformation `T_k(z) = z + N_k(z)`.
    pub fn transform(&self, k: usize, z: &[f64]) -> Result<Latent> {
        let net = self.bank.get(k).ok_or_else(|| EditKitError::Lookup {
            kind: "transform",
            name: k.to_string(),
        })?;
        let mut out = net.forward(&self.store, z)?;
        for (o, zi) in out.iter_mut().zip(z.iter()) {
            *o += zi;
        }
        Ok(out)
    }

    /// Pseudo-edit of a latent: exactly one transform is evaluated per call.
    pub fn pseudo_edit(&self, x: &[f64], req: &EditRequest) -> Result<Latent> {
        let (k, z) = self.routed_edit(x, req)?;
        self.transform(k, &z)
    }

    /// Ids of decoder and bank parameters (the default trainable set during
    /// self-training).
    pub fn decoder_and_bank_params(&self) -> Vec<crate::nn::ParamId> {
        let mut ids = self.decoder.param_ids();
        for net in &self.bank {
            ids.extend(net.param_ids());
        }
        ids
    }

    /// Group ids of the bank's region groups (the only groups eligible for
    /// sparsification).
    pub fn bank_region_groups(&self) -> Result<Vec<crate::nn::GroupId>> {
        let mut out = Vec::new();
        for i in 0..self.bank.len() {
            for r in 0..self.region_count {
                out.push(self.store.group_id(&format!("bank{i}.r{r}"))?);
            }
        }
        Ok(out)
    }

    /// Per-layer group ids of the encoder.
    pub fn encoder_groups(&self) -> Result<Vec<crate::nn::GroupId>> {
        (0..self.encoder.layers.len())
            .map(|i| self.store.group_id(&format!("enc.l{i}")))
            .collect()
    }

    /// Per-layer group ids of the decoder.
    pub fn decoder_groups(&self) -> Result<Vec<crate::nn::GroupId>> {
        (0..self.decoder.layers.len())
            .map(|i| self.store.group_id(&format!("dec.l{i}")))
            .collect()
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let wrapper = CheckpointFile { format: CHECKPOINT_FORMAT.to_string(), model: self.clone() };
        serde_json::to_writer(std::io::BufWriter::new(file), &wrapper)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<EditModel> {
        let file = std::fs::File::open(path)?;
        let wrapper: CheckpointFile = serde_json::from_reader(std::io::BufReader::new(file))?;
        if wrapper.format != CHECKPOINT_FORMAT {
            return Err(EditKitError::Data(format!(
                "unsupported checkpoint format {}",
                wrapper.format
            )));
        }
        wrapper.model.store.validate_partition()?;
        Ok(wrapper.model)
    }
}

pub const CHECKPOINT_FORMAT: &str = "editkit-checkpoint-v1";

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    model: EditModel,
}
