//! Identity, faithfulness, and generation objectives, plus reverse-mode
//! gradients of their weighted sum through the whole editing pipeline.
//!
//! The oracles are differentiable because the ground-truth decoder has a
//! smooth inverse, so no surrogate classifier is involved: gradients flow
//! from the losses through the exact inverse map into the decoder and the
//! routed transformation.

use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};
use crate::linalg::{dot, norm2, sub};
use crate::model::{EditModel, EditRequest};
use crate::nn::GradRecord;
use crate::world::{AttributeOracle, GroundTruth, IdentityOracle, Observation};

/// Weights of the three objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub id: f64,
    pub faith: f64,
    pub gen: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights { id: 0.5, faith: 0.1, gen: 1.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("id", self.id), ("faith", self.faith), ("gen", self.gen)] {
            if !v.is_finite() || v < 0.0 {
                return Err(EditKitError::Config(format!(
                    "loss weight {name} = {v} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }
}

/// Per-term loss values and their weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub l_id: f64,
    pub l_faith: f64,
    pub l_gen: f64,
    pub l_overall: f64,
}

/// Identity loss: Euclidean distance between the identity embeddings of the
/// original and the edited frame.
pub fn loss_id(oracle: &IdentityOracle, f: &[f64], f_hat: &[f64]) -> Result<f64> {
    let e = oracle.embed(f)?;
    let e_hat = oracle.embed(f_hat)?;
    Ok(norm2(&sub(&e, &e_hat)))
}

/// Faithfulness loss: sum of absolute non-target logit changes minus
/// `gamma` times the absolute target logit change.
pub fn loss_faith(
    oracle: &AttributeOracle,
    f: &[f64],
    f_hat: &[f64],
    target: usize,
    gamma: f64,
) -> Result<f64> {
    let logits = oracle.logits(f)?;
    if target >= logits.len() {
        return Err(EditKitError::Config(format!(
            "target attribute {target} out of range (have {})",
            logits.len()
        )));
    }
    let logits_hat = oracle.logits(f_hat)?;
    let mut preserve = 0.0;
    let mut change = 0.0;
    for (j, (a, b)) in logits.iter().zip(logits_hat.iter()).enumerate() {
        let diff = (a - b).abs();
        if j == target {
            change = diff;
        } else {
            preserve += diff;
        }
    }
    Ok(preserve - gamma * change)
}

/// Generation loss: mean squared error between a frame and its
/// reconstruction.
pub fn loss_gen(f: &[f64], recon: &[f64]) -> Result<f64> {
    if f.len() != recon.len() {
        return Err(EditKitError::Shape(format!(
            "loss_gen: lengths {} vs {}",
            f.len(),
            recon.len()
        )));
    }
    let n = f.len() as f64;
    Ok(f.iter().zip(recon.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n)
}

/// Weighted sum of the three parts, keeping the breakdown for logging.
pub fn loss_overall(l_id: f64, l_faith: f64, l_gen: f64, w: &LossWeights) -> LossBreakdown {
    LossBreakdown {
        l_id,
        l_faith,
        l_gen,
        l_overall: w.id * l_id + w.faith * l_faith + w.gen * l_gen,
    }
}

/// Everything produced by one forward pass of the editing pipeline.
#[derive(Debug, Clone)]
pub struct StepForward {
    pub breakdown: LossBreakdown,
    pub cluster: usize,
    pub edited_obs: Observation,
    pub recon_obs: Observation,
}

/// Forward pass of the full pipeline (encode, pseudo-edit, decode twice) and
/// the three losses; when `grads` is given, also accumulates d l_overall /
/// d theta for decoder and bank parameters, plus the encoder when
/// `train_encoder` is set.
///
/// Gradients of the absolute values and the Euclidean norm use the
/// subgradient 0 at their kinks.
pub fn pipeline_step(
    model: &EditModel,
    gt: &GroundTruth,
    frame: &[f64],
    target: usize,
    req: &EditRequest,
    weights: &LossWeights,
    mut grads: Option<&mut GradRecord>,
    train_encoder: bool,
) -> Result<StepForward> {
    if target >= gt.num_attributes() {
        return Err(EditKitError::Config(format!(
            "target attribute {target} out of range (have {})",
            gt.num_attributes()
        )));
    }
    let x = model.encode(frame)?;
    let (cluster, z) = model.routed_edit(&x, req)?;
    let x_hat = model.transform(cluster, &z)?;
    let f_hat = model.decode(&x_hat)?;
    let recon = model.decode(&x)?;

    // Oracle values for the original frame (constants w.r.t. parameters).
    let z_orig = gt.invert_obs(frame)?;
    let e_orig = &z_orig[gt.identity_start..gt.identity_start + gt.identity_dim];
    let logits_orig: Vec<f64> = gt.attr_directions.iter().map(|a| dot(a, &z_orig)).collect();

    // Oracle values for the edited frame, traced for the VJP.
    let (z_hat, trace_hat) = gt.invert_obs_traced(&f_hat)?;
    let e_hat = &z_hat[gt.identity_start..gt.identity_start + gt.identity_dim];
    let logits_hat: Vec<f64> = gt.attr_directions.iter().map(|a| dot(a, &z_hat)).collect();

    let id_diff = sub(e_orig, e_hat);
    let l_id = norm2(&id_diff);
    let mut l_faith = 0.0;
    for j in 0..logits_orig.len() {
        let diff = (logits_orig[j] - logits_hat[j]).abs();
        if j == target {
            l_faith -= req.gamma * diff;
        } else {
            l_faith += diff;
        }
    }
    let l_gen = loss_gen(frame, &recon)?;
    let breakdown = loss_overall(l_id, l_faith, l_gen, weights);

    if let Some(grads) = grads.as_deref_mut() {
        // Cotangent of the inverted edited latent z_hat.
        let mut cot_z_hat = vec![0.0; gt.latent_dim];
        if l_id > 0.0 {
            // d l_id / d e_hat = (e_hat - e_orig) / l_id, scaled by the weight.
            for (i, d) in id_diff.iter().enumerate() {
                cot_z_hat[gt.identity_start + i] += weights.id * (-d) / l_id;
            }
        }
        for (j, dir) in gt.attr_directions.iter().enumerate() {
            let delta = logits_orig[j] - logits_hat[j];
            let s = if delta > 0.0 {
                1.0
            } else if delta < 0.0 {
                -1.0
            } else {
                0.0
            };
            // d |delta| / d logit_hat = -sign(delta); target enters with
            // coefficient -gamma.
            let coeff = if j == target {
                weights.faith * req.gamma * s
            } else {
                weights.faith * (-s)
            };
            if coeff != 0.0 {
                for (c, a) in cot_z_hat.iter_mut().zip(dir.iter()) {
                    *c += coeff * a;
                }
            }
        }
        let cot_f_hat = gt.inverse_vjp(&trace_hat, &cot_z_hat)?;
        let cot_x_hat = model.decoder.backward_into(&model.store, &x_hat, &cot_f_hat, grads)?;
        // Residual transform: x_hat = z + N_k(z).
        let mut cot_z =
            model.bank[cluster].backward_into(&model.store, &z, &cot_x_hat, grads)?;
        for (c, extra) in cot_z.iter_mut().zip(cot_x_hat.iter()) {
            *c += extra;
        }
        // Reconstruction path.
        let n = frame.len() as f64;
        let cot_recon: Vec<f64> = recon
            .iter()
            .zip(frame.iter())
            .map(|(r, f)| weights.gen * 2.0 * (r - f) / n)
            .collect();
        let cot_x_recon = model.decoder.backward_into(&model.store, &x, &cot_recon, grads)?;
        if train_encoder {
            // The edit injection is an additive shift, so d z / d x = I.
            let mut cot_x = cot_z;
            for (c, extra) in cot_x.iter_mut().zip(cot_x_recon.iter()) {
                *c += extra;
            }
            model.encoder.backward_into(&model.store, frame, &cot_x, grads)?;
        }
    }

    Ok(StepForward { breakdown, cluster, edited_obs: f_hat, recon_obs: recon })
}
