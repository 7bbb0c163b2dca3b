//! Synthetic latent-editing benchmark with exact oracles.
//!
//! The world is fully observable: latents are laid out in disjoint coordinate
//! areas (motion, identity, attributes), observations are produced by an
//! invertible ground-truth decoder, and the identity / attribute oracles
//! invert that decoder exactly instead of approximating a pre-trained model.
//!
//! Latent layout (coordinates, low to high):
//!
//! ```text
//! [ motion (2) | pad | identity | attribute block (M) ]
//! ```
//!
//! The identity area starts at the first region boundary after the motion
//! coordinates, so frames of one video (which differ only in motion) invert
//! to bitwise-identical identity coordinates. The attribute block is split
//! into `bundle_count` contiguous chunks; directions inside a bundle share a
//! region footprint and a planted pairwise correlation (`bundle_coherence`),
//! which is what K-means later recovers. With `bundle_coherence = 0` the
//! directions are exactly orthonormal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};
use crate::linalg::{dot, Mat};

/// Observation vectors live in the decoder's output space (same dimension as
/// latents; the map is invertible).
pub type Latent = Vec<f64>;
pub type Observation = Vec<f64>;

fn default_bundle_count() -> usize {
    5
}
fn default_bundle_coherence() -> f64 {
    0.09
}
fn default_train_videos() -> usize {
    72
}
fn default_val_videos() -> usize {
    24
}
fn default_motion_amplitude() -> f64 {
    0.8
}
fn default_motion_angular_step() -> f64 {
    0.35
}
fn default_attr_offset_scale() -> f64 {
    0.45
}

/// Parameters of a synthetic world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    /// Latent (and observation) dimension `d`.
    pub latent_dim: usize,
    /// Number of editable attributes `M`.
    pub num_attributes: usize,
    pub num_identities: usize,
    /// Frames per video `N`.
    pub frames_per_video: usize,
    /// Number of contiguous equal latent regions `R`; must divide `d`.
    pub region_count: usize,
    pub seed: u64,
    /// Number of planted attribute bundles.
    #[serde(default = "default_bundle_count")]
    pub bundle_count: usize,
    /// Planted in-bundle Gram off-diagonal; 0 means exactly orthonormal.
    #[serde(default = "default_bundle_coherence")]
    pub bundle_coherence: f64,
    #[serde(default = "default_train_videos")]
    pub train_videos: usize,
    #[serde(default = "default_val_videos")]
    pub val_videos: usize,
    #[serde(default = "default_motion_amplitude")]
    pub motion_amplitude: f64,
    /// Radians advanced per frame by the motion sinusoids.
    #[serde(default = "default_motion_angular_step")]
    pub motion_angular_step: f64,
    /// Per-video attribute offsets are uniform in `[-scale, scale]`.
    #[serde(default = "default_attr_offset_scale")]
    pub attr_offset_scale: f64,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            latent_dim: 32,
            num_attributes: 20,
            num_identities: 96,
            frames_per_video: 16,
            region_count: 8,
            seed: 7,
            bundle_count: default_bundle_count(),
            bundle_coherence: default_bundle_coherence(),
            train_videos: default_train_videos(),
            val_videos: default_val_videos(),
            motion_amplitude: default_motion_amplitude(),
            motion_angular_step: default_motion_angular_step(),
            attr_offset_scale: default_attr_offset_scale(),
        }
    }
}

impl WorldSpec {
    /// Size of one latent region.
    pub fn region_size(&self) -> usize {
        self.latent_dim / self.region_count
    }

    /// First identity coordinate: the first region boundary at or after the
    /// two motion coordinates.
    pub fn identity_start(&self) -> usize {
        let g = self.region_size();
        2usize.div_ceil(g) * g
    }

    /// First attribute coordinate (the block occupies the top `M` coords).
    pub fn attr_start(&self) -> usize {
        self.latent_dim - self.num_attributes
    }

    pub fn identity_dim(&self) -> usize {
        self.attr_start().saturating_sub(self.identity_start())
    }

    /// Upper bound on the latent step between consecutive frames.
    pub fn motion_step_bound(&self) -> f64 {
        2.0 * self.motion_amplitude * (self.motion_angular_step / 2.0).sin().abs() * 2f64.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(EditKitError::Spec(msg));
        if self.latent_dim == 0 || self.num_attributes == 0 || self.region_count == 0 {
            return fail("latent_dim, num_attributes and region_count must be positive".into());
        }
        if self.num_attributes > self.latent_dim {
            return fail(format!(
                "num_attributes {} exceeds latent_dim {}",
                self.num_attributes, self.latent_dim
            ));
        }
        if self.latent_dim % self.region_count != 0 {
            return fail(format!(
                "region_count {} does not divide latent_dim {}",
                self.region_count, self.latent_dim
            ));
        }
        if self.identity_dim() == 0 {
            return fail(format!(
                "no room for identity coordinates: latent_dim {} needs at least {} \
                 (motion+pad {} + 1 identity + {} attributes)",
                self.latent_dim,
                self.identity_start() + 1 + self.num_attributes,
                self.identity_start(),
                self.num_attributes
            ));
        }
        if self.bundle_count == 0 || self.bundle_count > self.num_attributes {
            return fail(format!(
                "bundle_count {} must be in 1..={}",
                self.bundle_count, self.num_attributes
            ));
        }
        if !(0.0..1.0).contains(&self.bundle_coherence) {
            return fail(format!("bundle_coherence {} must be in [0, 1)", self.bundle_coherence));
        }
        if self.num_identities == 0 || self.frames_per_video == 0 {
            return fail("need at least one identity and one frame".into());
        }
        if self.train_videos == 0 {
            return fail("need at least one training video".into());
        }
        if self.train_videos + self.val_videos != self.num_identities {
            return fail(format!(
                "train_videos {} + val_videos {} must equal num_identities {} (one video per identity)",
                self.train_videos, self.val_videos, self.num_identities
            ));
        }
        if self.motion_amplitude < 0.0 || self.attr_offset_scale < 0.0 {
            return fail("motion_amplitude and attr_offset_scale must be nonnegative".into());
        }
        Ok(())
    }
}

/// Invertible affine acting on one latent region: `y = A x + b`.
///
/// `A = Q1 diag(s) Q2` with orthogonal factors, so the exact inverse
/// `A^-1 = Q2^T diag(1/s) Q1^T` is stored alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionAffine {
    pub a: Mat,
    pub a_inv: Mat,
    pub bias: Vec<f64>,
    pub singular_values: Vec<f64>,
}

/// One decoder block: a per-region affine followed by the elementwise
/// nonlinearity `phi(t) = t + 0.5 tanh(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderBlock {
    pub affines: Vec<RegionAffine>,
}

#[inline]
fn phi(t: f64) -> f64 {
    t + 0.5 * t.tanh()
}

#[inline]
fn phi_prime(t: f64) -> f64 {
    let th = t.tanh();
    1.0 + 0.5 * (1.0 - th * th)
}

/// Inverse of `phi` by Newton's method; `phi' >= 1`, so this converges fast
/// to machine precision.
fn phi_inv(y: f64) -> f64 {
    let mut x = y - 0.5 * y.tanh();
    for _ in 0..64 {
        let r = phi(x) - y;
        if r.abs() <= 1e-15 * y.abs().max(1.0) {
            break;
        }
        x -= r / phi_prime(x);
    }
    x
}

/// Intermediates of one observation inversion, reused by the inverse VJP.
#[derive(Debug, Clone)]
pub struct InverseTrace {
    /// Output of `phi^-1` per processed block, in processing order
    /// (last decoder block first).
    phi_outputs: Vec<Vec<f64>>,
}

/// Ground truth of a generated world: planted directions, identity subspace,
/// the invertible decoder, and the locality mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub latent_dim: usize,
    pub region_count: usize,
    pub region_size: usize,
    pub identity_start: usize,
    pub identity_dim: usize,
    pub attr_start: usize,
    /// Planted attribute directions, unit norm, one per attribute.
    pub attr_directions: Vec<Vec<f64>>,
    /// Planted bundle of each attribute.
    pub bundle_of: Vec<usize>,
    pub bundle_count: usize,
    pub bundle_coherence: f64,
    /// Regions truly affected by each attribute's direction.
    pub locality_mask: Vec<Vec<usize>>,
    pub blocks: Vec<DecoderBlock>,
}

impl GroundTruth {
    /// Applies the invertible decoder to a latent.
    pub fn decode_latent(&self, latent: &[f64]) -> Result<Observation> {
        if latent.len() != self.latent_dim {
            return Err(EditKitError::Shape(format!(
                "decode_latent: expected dim {}, got {}",
                self.latent_dim,
                latent.len()
            )));
        }
        let g = self.region_size;
        let mut x = latent.to_vec();
        for block in &self.blocks {
            let mut y = vec![0.0; self.latent_dim];
            for (r, aff) in block.affines.iter().enumerate() {
                let seg = aff.a.matvec(&x[r * g..(r + 1) * g])?;
                for (i, v) in seg.iter().enumerate() {
                    y[r * g + i] = v + aff.bias[i];
                }
            }
            for v in &mut y {
                *v = phi(*v);
            }
            x = y;
        }
        Ok(x)
    }

    /// Exact inverse of [`Self::decode_latent`].
    pub fn invert_obs(&self, obs: &[f64]) -> Result<Latent> {
        Ok(self.invert_obs_traced(obs)?.0)
    }

    /// Inverse plus the intermediates needed for [`Self::inverse_vjp`].
    pub fn invert_obs_traced(&self, obs: &[f64]) -> Result<(Latent, InverseTrace)> {
        if obs.len() != self.latent_dim {
            return Err(EditKitError::Shape(format!(
                "invert_obs: expected dim {}, got {}",
                self.latent_dim,
                obs.len()
            )));
        }
        let g = self.region_size;
        let mut w = obs.to_vec();
        let mut phi_outputs = Vec::with_capacity(self.blocks.len());
        for block in self.blocks.iter().rev() {
            let x: Vec<f64> = w.iter().map(|&v| phi_inv(v)).collect();
            phi_outputs.push(x.clone());
            let mut next = vec![0.0; self.latent_dim];
            for (r, aff) in block.affines.iter().enumerate() {
                let mut seg = x[r * g..(r + 1) * g].to_vec();
                for (s, b) in seg.iter_mut().zip(aff.bias.iter()) {
                    *s -= b;
                }
                let inv = aff.a_inv.matvec(&seg)?;
                next[r * g..(r + 1) * g].copy_from_slice(&inv);
            }
            w = next;
        }
        Ok((w, InverseTrace { phi_outputs }))
    }

    /// Vector-Jacobian product of the inverse map: given the cotangent of
    /// `z = invert_obs(f)`, returns the cotangent of `f`.
    pub fn inverse_vjp(&self, trace: &InverseTrace, cot_latent: &[f64]) -> Result<Vec<f64>> {
        if cot_latent.len() != self.latent_dim {
            return Err(EditKitError::Shape(format!(
                "inverse_vjp: expected dim {}, got {}",
                self.latent_dim,
                cot_latent.len()
            )));
        }
        let g = self.region_size;
        let mut v = cot_latent.to_vec();
        // Processing order of the inverse was blocks.rev(); undo it forwards.
        for (i, block) in self.blocks.iter().enumerate() {
            let trace_idx = self.blocks.len() - 1 - i;
            let mut through_affine = vec![0.0; self.latent_dim];
            for (r, aff) in block.affines.iter().enumerate() {
                let seg = aff.a_inv.matvec_t(&v[r * g..(r + 1) * g])?;
                through_affine[r * g..(r + 1) * g].copy_from_slice(&seg);
            }
            let x = &trace.phi_outputs[trace_idx];
            for (vv, xx) in through_affine.iter_mut().zip(x.iter()) {
                *vv /= phi_prime(*xx);
            }
            v = through_affine;
        }
        Ok(v)
    }

    /// Identity embedding: projection of the inverted observation onto the
    /// identity coordinates.
    pub fn identity_embed(&self, obs: &[f64]) -> Result<Vec<f64>> {
        let z = self.invert_obs(obs)?;
        Ok(z[self.identity_start..self.identity_start + self.identity_dim].to_vec())
    }

    /// Ground-truth attribute logits: inner products of the inverted
    /// observation with every planted direction.
    pub fn attr_logits(&self, obs: &[f64]) -> Result<Vec<f64>> {
        let z = self.invert_obs(obs)?;
        Ok(self.attr_directions.iter().map(|a| dot(a, &z)).collect())
    }

    pub fn num_attributes(&self) -> usize {
        self.attr_directions.len()
    }

    /// Ground-truth editor: shifts every true latent of a video by
    /// `gamma * sign * a_target` and re-decodes. The ideal editor that
    /// learned systems are compared against.
    pub fn oracle_edit_video(
        &self,
        video: &SyntheticVideo,
        target: usize,
        gamma: f64,
        sign: f64,
    ) -> Result<Vec<Observation>> {
        let dir = self.attr_directions.get(target).ok_or_else(|| EditKitError::Lookup {
            kind: "attribute",
            name: target.to_string(),
        })?;
        video
            .true_latents
            .iter()
            .map(|latent| {
                let mut edited = latent.clone();
                for (x, a) in edited.iter_mut().zip(dir.iter()) {
                    *x += gamma * sign * a;
                }
                self.decode_latent(&edited)
            })
            .collect()
    }
}

/// Exact stand-in for a pre-trained identity extractor.
#[derive(Debug, Clone, Copy)]
pub struct IdentityOracle<'a> {
    pub gt: &'a GroundTruth,
}

impl IdentityOracle<'_> {
    pub fn embed(&self, obs: &[f64]) -> Result<Vec<f64>> {
        self.gt.identity_embed(obs)
    }
}

/// Exact stand-in for a pre-trained attribute classifier.
#[derive(Debug, Clone, Copy)]
pub struct AttributeOracle<'a> {
    pub gt: &'a GroundTruth,
}

impl AttributeOracle<'_> {
    pub fn logits(&self, obs: &[f64]) -> Result<Vec<f64>> {
        self.gt.attr_logits(obs)
    }
}

/// One synthetic video: decoded frames plus the true latents behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticVideo {
    pub video_id: usize,
    pub identity_id: usize,
    pub frames: Vec<Observation>,
    pub true_latents: Vec<Latent>,
}

/// Train/validation split of generated videos.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSet {
    pub train: Vec<SyntheticVideo>,
    pub val: Vec<SyntheticVideo>,
}

/// A complete dataset file: spec, ground truth and videos.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub spec: WorldSpec,
    pub ground_truth: GroundTruth,
    pub videos: VideoSet,
}

impl Dataset {
    pub fn generate(spec: &WorldSpec) -> Result<Dataset> {
        let (ground_truth, videos) = generate_world(spec)?;
        Ok(Dataset { spec: spec.clone(), ground_truth, videos })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Dataset> {
        let file = std::fs::File::open(path)?;
        let ds: Dataset = serde_json::from_reader(std::io::BufReader::new(file))?;
        ds.spec.validate()?;
        Ok(ds)
    }

    pub fn train_frames(&self) -> impl Iterator<Item = &Observation> {
        self.videos.train.iter().flat_map(|v| v.frames.iter())
    }
}

/// The embedded edit directions seen by the model (planted directions plus
/// optional Gaussian perturbation, renormalized).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeCodebook {
    pub embeddings: Vec<Vec<f64>>,
    pub noise: f64,
}

impl AttributeCodebook {
    pub fn len(&self) -> usize {
        self.embeddings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.embeddings.is_empty()
    }
}

/// Canonical attribute names used by CLI and reports.
pub fn attr_name(j: usize) -> String {
    format!("attr{j:02}")
}

pub fn parse_attr_name(name: &str, num_attributes: usize) -> Result<usize> {
    let idx = name
        .strip_prefix("attr")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| EditKitError::Config(format!("unknown attribute name {name}")))?;
    if idx >= num_attributes {
        return Err(EditKitError::Config(format!(
            "attribute {name} out of range (have {num_attributes})"
        )));
    }
    Ok(idx)
}

/// Random orthogonal matrix via modified Gram-Schmidt on a Gaussian matrix,
/// with one re-orthogonalization pass.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    for pass in 0..2 {
        for i in 0..n {
            for j in 0..i {
                let proj = dot(&cols[i], &cols[j]);
                let prev = cols[j].clone();
                for (a, b) in cols[i].iter_mut().zip(prev.iter()) {
                    *a -= proj * b;
                }
            }
            let nrm = dot(&cols[i], &cols[i]).sqrt();
            if nrm < 1e-12 && pass == 0 {
                // Degenerate draw; replace and retry on the spot.
                for v in cols[i].iter_mut() {
                    *v = rng.sample::<f64, _>(StandardNormal);
                }
            } else {
                for v in cols[i].iter_mut() {
                    *v /= nrm;
                }
            }
        }
    }
    let mut m = Mat::zeros(n, n);
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            m.set(r, c, *v);
        }
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = Mat::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aik * b.get(k, j);
            }
        }
    }
    out
}

fn region_affine(g: usize, rng: &mut ChaCha8Rng) -> RegionAffine {
    // Singular values log-uniform in [0.7, 1.45]: condition number <= 2.1,
    // comfortably inside the <= 10 budget. Mild gains keep the benchmark
    // learnable by small nets while staying nonlinear.
    let q1 = random_orthogonal(g, rng);
    let q2 = random_orthogonal(g, rng);
    let s: Vec<f64> = (0..g)
        .map(|_| (rng.random_range(0.7_f64.ln()..=1.45_f64.ln())).exp())
        .collect();
    let mut d = Mat::zeros(g, g);
    let mut d_inv = Mat::zeros(g, g);
    for i in 0..g {
        d.set(i, i, s[i]);
        d_inv.set(i, i, 1.0 / s[i]);
    }
    let a = mat_mul(&mat_mul(&q1, &d), &q2);
    // A^-1 = Q2^T D^-1 Q1^T
    let mut q2t = Mat::zeros(g, g);
    let mut q1t = Mat::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            q2t.set(i, j, q2.get(j, i));
            q1t.set(i, j, q1.get(j, i));
        }
    }
    let a_inv = mat_mul(&mat_mul(&q2t, &d_inv), &q1t);
    let bias: Vec<f64> = (0..g).map(|_| 0.2 * rng.sample::<f64, _>(StandardNormal)).collect();
    RegionAffine { a, a_inv, bias, singular_values: s }
}

/// Sizes of each bundle: `M` attributes spread as evenly as possible.
fn bundle_sizes(m: usize, bundles: usize) -> Vec<usize> {
    let base = m / bundles;
    let rem = m % bundles;
    (0..bundles).map(|b| base + usize::from(b < rem)).collect()
}

fn planted_directions(spec: &WorldSpec, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let d = spec.latent_dim;
    let c = spec.bundle_coherence;
    let sizes = bundle_sizes(spec.num_attributes, spec.bundle_count);
    let mut directions = Vec::with_capacity(spec.num_attributes);
    let mut bundle_of = Vec::with_capacity(spec.num_attributes);
    let mut offset = spec.attr_start();
    for (b, &m) in sizes.iter().enumerate() {
        // Local directions with Gram (1-c)I + c 11^T: rows of G^(1/2) Rot.
        let alpha = (1.0 - c).sqrt();
        let beta = (1.0 + (m as f64 - 1.0) * c).sqrt();
        let t = (beta - alpha) / m as f64;
        let rot = random_orthogonal(m, rng);
        for j in 0..m {
            let mut local = vec![0.0; m];
            for k in 0..m {
                // (alpha I + t 11^T) row j times Rot.
                let coeff_row: f64 = alpha * rot.get(j, k)
                    + t * (0..m).map(|i| rot.get(i, k)).sum::<f64>();
                local[k] = coeff_row;
            }
            let mut dir = vec![0.0; d];
            dir[offset..offset + m].copy_from_slice(&local);
            directions.push(dir);
            bundle_of.push(b);
        }
        offset += m;
    }
    (directions, bundle_of)
}

fn locality_from_support(directions: &[Vec<f64>], region_size: usize) -> Vec<Vec<usize>> {
    directions
        .iter()
        .map(|dir| {
            let mut regions: Vec<usize> = dir
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, _)| i / region_size)
                .collect();
            regions.dedup();
            regions
        })
        .collect()
}

/// Generates ground truth and the train/validation videos. Deterministic
/// given the spec (including its seed).
pub fn generate_world(spec: &WorldSpec) -> Result<(GroundTruth, VideoSet)> {
    spec.validate()?;
    let d = spec.latent_dim;
    let g = spec.region_size();
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rng_decoder = ChaCha8Rng::seed_from_u64(master.random());
    let mut rng_directions = ChaCha8Rng::seed_from_u64(master.random());
    let mut rng_identities = ChaCha8Rng::seed_from_u64(master.random());
    let mut rng_videos = ChaCha8Rng::seed_from_u64(master.random());

    let blocks: Vec<DecoderBlock> = (0..3)
        .map(|_| DecoderBlock {
            affines: (0..spec.region_count).map(|_| region_affine(g, &mut rng_decoder)).collect(),
        })
        .collect();

    let (attr_directions, bundle_of) = planted_directions(spec, &mut rng_directions);
    let locality_mask = locality_from_support(&attr_directions, g);

    let gt = GroundTruth {
        latent_dim: d,
        region_count: spec.region_count,
        region_size: g,
        identity_start: spec.identity_start(),
        identity_dim: spec.identity_dim(),
        attr_start: spec.attr_start(),
        attr_directions,
        bundle_of,
        bundle_count: spec.bundle_count,
        bundle_coherence: spec.bundle_coherence,
        locality_mask,
        blocks,
    };

    // Unit identity vectors, one per identity.
    let identities: Vec<Vec<f64>> = (0..spec.num_identities)
        .map(|_| {
            let mut v: Vec<f64> = (0..gt.identity_dim)
                .map(|_| rng_identities.sample::<f64, _>(StandardNormal))
                .collect();
            let n = dot(&v, &v).sqrt().max(1e-12);
            for x in &mut v {
                *x /= n;
            }
            v
        })
        .collect();

    let mut train = Vec::new();
    let mut val = Vec::new();
    for (vid, ident) in identities.iter().enumerate() {
        let phase_a: f64 = rng_videos.random_range(0.0..std::f64::consts::TAU);
        let phase_b: f64 = rng_videos.random_range(0.0..std::f64::consts::TAU);
        let offsets: Vec<f64> = (0..spec.num_attributes)
            .map(|_| rng_videos.random_range(-spec.attr_offset_scale..=spec.attr_offset_scale))
            .collect();
        let mut base = vec![0.0; d];
        base[gt.identity_start..gt.identity_start + gt.identity_dim].copy_from_slice(ident);
        for (j, &o) in offsets.iter().enumerate() {
            for (bi, ai) in base.iter_mut().zip(gt.attr_directions[j].iter()) {
                *bi += o * ai;
            }
        }
        let mut frames = Vec::with_capacity(spec.frames_per_video);
        let mut true_latents = Vec::with_capacity(spec.frames_per_video);
        for tstep in 0..spec.frames_per_video {
            let theta = spec.motion_angular_step * tstep as f64;
            let mut latent = base.clone();
            latent[0] = spec.motion_amplitude * (theta + phase_a).sin();
            latent[1] = spec.motion_amplitude * (theta + phase_b).cos();
            let frame = gt.decode_latent(&latent)?;
            frames.push(frame);
            true_latents.push(latent);
        }
        let video = SyntheticVideo { video_id: vid, identity_id: vid, frames, true_latents };
        if vid < spec.train_videos {
            train.push(video);
        } else {
            val.push(video);
        }
    }

    Ok((gt, VideoSet { train, val }))
}

/// Returns the planted directions perturbed by seeded Gaussian noise and
/// renormalized to unit length. `noise` scales the expected norm of the
/// whole perturbation (per-coordinate std is `noise / sqrt(d)`).
pub fn attribute_codebook(gt: &GroundTruth, noise: f64, seed: u64) -> AttributeCodebook {
    if noise == 0.0 {
        return AttributeCodebook { embeddings: gt.attr_directions.clone(), noise };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_coord = noise / (gt.latent_dim as f64).sqrt();
    let embeddings = gt
        .attr_directions
        .iter()
        .map(|dir| {
            let mut e: Vec<f64> = dir
                .iter()
                .map(|&v| v + per_coord * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let n = dot(&e, &e).sqrt().max(1e-12);
            for x in &mut e {
                *x /= n;
            }
            e
        })
        .collect();
    AttributeCodebook { embeddings, noise }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cosine, norm2, sub};

    fn small_spec(seed: u64) -> WorldSpec {
        WorldSpec {
            latent_dim: 16,
            num_attributes: 8,
            num_identities: 4,
            frames_per_video: 6,
            region_count: 4,
            seed,
            bundle_count: 2,
            train_videos: 3,
            val_videos: 1,
            ..WorldSpec::default()
        }
    }

    #[test]
    fn default_spec_is_valid_and_region_aligned() {
        let spec = WorldSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.region_size(), 4);
        assert_eq!(spec.identity_start(), 4);
        assert_eq!(spec.identity_dim(), 8);
        assert_eq!(spec.attr_start(), 12);
    }

    #[test]
    fn spec_errors() {
        let mut spec = WorldSpec::default();
        spec.num_attributes = 40;
        assert!(matches!(spec.validate(), Err(EditKitError::Spec(_))));
        let mut spec = WorldSpec::default();
        spec.region_count = 5;
        assert!(matches!(spec.validate(), Err(EditKitError::Spec(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = small_spec(11);
        let a = Dataset::generate(&spec).unwrap();
        let b = Dataset::generate(&spec).unwrap();
        assert_eq!(a, b);
        let c = Dataset::generate(&WorldSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.videos.train[0].frames[0], c.videos.train[0].frames[0]);
    }

    #[test]
    fn decoder_roundtrip_recovers_true_latents() {
        let ds = Dataset::generate(&WorldSpec::default()).unwrap();
        for video in ds.videos.train.iter().chain(ds.videos.val.iter()) {
            for (frame, latent) in video.frames.iter().zip(video.true_latents.iter()) {
                let rec = ds.ground_truth.invert_obs(frame).unwrap();
                let err = norm2(&sub(&rec, latent));
                assert!(err < 1e-9, "roundtrip error {err}");
            }
        }
    }

    #[test]
    fn region_affines_are_well_conditioned() {
        let ds = Dataset::generate(&WorldSpec::default()).unwrap();
        for block in &ds.ground_truth.blocks {
            for aff in &block.affines {
                let smax = aff.singular_values.iter().cloned().fold(0.0_f64, f64::max);
                let smin = aff.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(smax / smin <= 10.0);
            }
        }
    }

    #[test]
    fn identity_coordinates_shared_exactly_within_video() {
        let ds = Dataset::generate(&WorldSpec::default()).unwrap();
        for video in ds.videos.train.iter().chain(ds.videos.val.iter()) {
            let first = ds.ground_truth.identity_embed(&video.frames[0]).unwrap();
            for frame in &video.frames[1..] {
                let e = ds.ground_truth.identity_embed(frame).unwrap();
                // Bitwise: identity regions see identical inputs across frames.
                assert_eq!(e, first);
            }
        }
    }

    #[test]
    fn identities_differ_across_videos() {
        let ds = Dataset::generate(&small_spec(3)).unwrap();
        let all: Vec<_> = ds
            .videos
            .train
            .iter()
            .chain(ds.videos.val.iter())
            .map(|v| {
                let z = &v.true_latents[0];
                z[ds.ground_truth.identity_start
                    ..ds.ground_truth.identity_start + ds.ground_truth.identity_dim]
                    .to_vec()
            })
            .collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }

    #[test]
    fn gram_matrix_is_exactly_planted() {
        // Coherence 0: orthonormal within 1e-12.
        let spec = WorldSpec { bundle_coherence: 0.0, ..WorldSpec::default() };
        let (gt, _) = generate_world(&spec).unwrap();
        for i in 0..gt.num_attributes() {
            for j in 0..gt.num_attributes() {
                let g = dot(&gt.attr_directions[i], &gt.attr_directions[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "gram[{i}][{j}] = {g}");
            }
        }
        // Default coherence: block structure within 1e-12.
        let spec = WorldSpec::default();
        let (gt, _) = generate_world(&spec).unwrap();
        for i in 0..gt.num_attributes() {
            for j in 0..gt.num_attributes() {
                let g = dot(&gt.attr_directions[i], &gt.attr_directions[j]);
                let want = if i == j {
                    1.0
                } else if gt.bundle_of[i] == gt.bundle_of[j] {
                    spec.bundle_coherence
                } else {
                    0.0
                };
                assert!((g - want).abs() < 1e-12, "gram[{i}][{j}] = {g}");
            }
        }
    }

    #[test]
    fn identity_embedding_ignores_attribute_edits() {
        let ds = Dataset::generate(&WorldSpec::default()).unwrap();
        let gt = &ds.ground_truth;
        let video = &ds.videos.train[0];
        let latent = &video.true_latents[0];
        let e_before = gt.identity_embed(&video.frames[0]).unwrap();
        let mut edited = latent.clone();
        for (x, a) in edited.iter_mut().zip(gt.attr_directions[5].iter()) {
            *x += 0.9 * a;
        }
        let f_edited = gt.decode_latent(&edited).unwrap();
        let e_after = gt.identity_embed(&f_edited).unwrap();
        assert!(norm2(&sub(&e_after, &e_before)) < 1e-9);
    }

    #[test]
    fn identity_cosine_matches_naive_script() {
        let ds = Dataset::generate(&small_spec(5)).unwrap();
        let gt = &ds.ground_truth;
        let fa = &ds.videos.train[0].frames[0];
        let fb = &ds.videos.train[1].frames[0];
        let got = cosine(&gt.identity_embed(fa).unwrap(), &gt.identity_embed(fb).unwrap());
        // Naive: invert, slice, explicit cosine.
        let za = gt.invert_obs(fa).unwrap();
        let zb = gt.invert_obs(fb).unwrap();
        let s = gt.identity_start;
        let e = s + gt.identity_dim;
        let (mut d, mut na, mut nb) = (0.0, 0.0, 0.0);
        for i in s..e {
            d += za[i] * zb[i];
            na += za[i] * za[i];
            nb += zb[i] * zb[i];
        }
        let want = d / (na.sqrt() * nb.sqrt());
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn attr_logits_zero_offsets_and_unit_shift() {
        let spec = WorldSpec { bundle_coherence: 0.0, ..WorldSpec::default() };
        let (gt, _) = generate_world(&spec).unwrap();
        // A latent with motion and identity but no attribute content.
        let mut latent = vec![0.0; spec.latent_dim];
        latent[0] = 0.4;
        latent[1] = -0.2;
        latent[gt.identity_start] = 1.0;
        let f = gt.decode_latent(&latent).unwrap();
        let logits = gt.attr_logits(&f).unwrap();
        assert!(logits.iter().all(|l| l.abs() < 1e-9));

        // Shift by 0.7 * a_3: logit 3 rises by 0.7, others unchanged.
        let mut shifted = latent.clone();
        for (x, a) in shifted.iter_mut().zip(gt.attr_directions[3].iter()) {
            *x += 0.7 * a;
        }
        let f2 = gt.decode_latent(&shifted).unwrap();
        let logits2 = gt.attr_logits(&f2).unwrap();
        for (j, (l2, l1)) in logits2.iter().zip(logits.iter()).enumerate() {
            let want = if j == 3 { 0.7 } else { 0.0 };
            assert!((l2 - l1 - want).abs() < 1e-9, "logit {j}: {} vs {}", l2 - l1, want);
        }
    }

    #[test]
    fn attr_logit_shift_follows_gram_on_default_world() {
        let spec = WorldSpec::default();
        let (gt, videos) = generate_world(&spec).unwrap();
        let video = &videos.train[2];
        let base = gt.attr_logits(&video.frames[0]).unwrap();
        let mut edited = video.true_latents[0].clone();
        for (x, a) in edited.iter_mut().zip(gt.attr_directions[7].iter()) {
            *x += 0.7 * a;
        }
        let after = gt.attr_logits(&gt.decode_latent(&edited).unwrap()).unwrap();
        for j in 0..gt.num_attributes() {
            let want = 0.7 * dot(&gt.attr_directions[j], &gt.attr_directions[7]);
            assert!((after[j] - base[j] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn attr_logits_match_naive_dot_oracle() {
        let ds = Dataset::generate(&small_spec(9)).unwrap();
        let gt = &ds.ground_truth;
        let f = &ds.videos.val[0].frames[3];
        let logits = gt.attr_logits(f).unwrap();
        let z = gt.invert_obs(f).unwrap();
        for (j, l) in logits.iter().enumerate() {
            let mut acc = 0.0;
            for (a, b) in gt.attr_directions[j].iter().zip(z.iter()) {
                acc += a * b;
            }
            assert!((l - acc).abs() < 1e-12);
        }
    }

    #[test]
    fn codebook_noise_zero_equals_directions_exactly() {
        let (gt, _) = generate_world(&WorldSpec::default()).unwrap();
        let cb = attribute_codebook(&gt, 0.0, 123);
        assert_eq!(cb.embeddings, gt.attr_directions);
    }

    #[test]
    fn codebook_embeddings_are_unit_and_close_to_directions() {
        let (gt, _) = generate_world(&WorldSpec::default()).unwrap();
        let cb = attribute_codebook(&gt, 0.1, 77);
        for (e, a) in cb.embeddings.iter().zip(gt.attr_directions.iter()) {
            assert!((norm2(e) - 1.0).abs() < 1e-12);
            assert!(cosine(e, a) > 0.9);
        }
        // Direct-construction oracle: rebuild with the same seed and compare.
        let again = attribute_codebook(&gt, 0.1, 77);
        assert_eq!(cb, again);
    }

    #[test]
    fn locality_mask_is_exact_on_decoded_coordinates() {
        let spec = WorldSpec::default();
        let (gt, videos) = generate_world(&spec).unwrap();
        let g = gt.region_size;
        for j in [0, 7, 13, 19] {
            let latent = &videos.train[1].true_latents[2];
            let before = gt.decode_latent(latent).unwrap();
            let mut edited = latent.clone();
            for (x, a) in edited.iter_mut().zip(gt.attr_directions[j].iter()) {
                *x += 0.8 * a;
            }
            let after = gt.decode_latent(&edited).unwrap();
            let mask = &gt.locality_mask[j];
            let mut changed_somewhere = false;
            for (i, (b, a)) in before.iter().zip(after.iter()).enumerate() {
                let region = i / g;
                if mask.contains(&region) {
                    changed_somewhere |= a != b;
                } else {
                    // Regions outside the mask see bitwise-identical inputs.
                    assert_eq!(a, b, "coord {i} outside mask changed");
                }
            }
            assert!(changed_somewhere);
        }
    }

    #[test]
    fn bundle_footprints_are_shared_within_bundles() {
        let (gt, _) = generate_world(&WorldSpec::default()).unwrap();
        for i in 0..gt.num_attributes() {
            for j in 0..gt.num_attributes() {
                if gt.bundle_of[i] == gt.bundle_of[j] {
                    assert_eq!(gt.locality_mask[i], gt.locality_mask[j]);
                }
            }
        }
    }

    #[test]
    fn motion_steps_respect_bound() {
        let spec = WorldSpec::default();
        let (_, videos) = generate_world(&spec).unwrap();
        let bound = spec.motion_step_bound() + 1e-12;
        for v in videos.train.iter().chain(videos.val.iter()) {
            for w in v.true_latents.windows(2) {
                assert!(norm2(&sub(&w[1], &w[0])) <= bound);
            }
        }
    }

    #[test]
    fn inverse_vjp_matches_finite_differences() {
        let ds = Dataset::generate(&small_spec(13)).unwrap();
        let gt = &ds.ground_truth;
        let f = ds.videos.train[0].frames[1].clone();
        let d = f.len();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let cot: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let (_, trace) = gt.invert_obs_traced(&f).unwrap();
        let vjp = gt.inverse_vjp(&trace, &cot).unwrap();
        let h = 1e-6;
        for i in 0..d {
            let mut fp = f.clone();
            fp[i] += h;
            let mut fm = f.clone();
            fm[i] -= h;
            let up = dot(&gt.invert_obs(&fp).unwrap(), &cot);
            let down = dot(&gt.invert_obs(&fm).unwrap(), &cot);
            let fd = (up - down) / (2.0 * h);
            let rel = (vjp[i] - fd).abs() / vjp[i].abs().max(fd.abs()).max(1e-8);
            assert!(rel < 1e-4, "coord {i}: vjp {} vs fd {}", vjp[i], fd);
        }
    }

    #[test]
    fn dataset_roundtrips_through_json() {
        let dir = std::env::temp_dir().join("editkit_world_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ds.json");
        let ds = Dataset::generate(&small_spec(1)).unwrap();
        ds.save(&path).unwrap();
        let loaded = Dataset::load(&path).unwrap();
        assert_eq!(ds, loaded);
    }

    #[test]
    fn attr_names_roundtrip() {
        assert_eq!(attr_name(3), "attr03");
        assert_eq!(parse_attr_name("attr03", 20).unwrap(), 3);
        assert!(parse_attr_name("attr99", 20).is_err());
        assert!(parse_attr_name("bogus", 20).is_err());
    }
}
