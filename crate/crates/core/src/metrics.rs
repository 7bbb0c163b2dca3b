//! The five evaluation quantities computed from original/edited video pairs
//! using the world's exact oracles.
//!
//! - **ID-Preserve**: mean cosine similarity of identity embeddings between
//!   original and edited frames.
//! - **TL-ID / TG-ID**: identity-consistency of the edited video relative to
//!   the original, over adjacent pairs (TL) or all pairs (TG).
//! - **TACR**: fraction of frames whose target logit moved by at least
//!   `tau_change` in the requested direction.
//! - **NAPR**: fraction of frames whose non-target logits all stayed within
//!   `tau_preserve`.

use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};
use crate::linalg::cosine;
use crate::world::{GroundTruth, Observation, SyntheticVideo};

fn default_tau_change() -> f64 {
    0.25
}
fn default_tau_preserve() -> f64 {
    0.1
}

/// Thresholds used by the frame-counting metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    #[serde(default = "default_tau_change")]
    pub tau_change: f64,
    #[serde(default = "default_tau_preserve")]
    pub tau_preserve: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { tau_change: default_tau_change(), tau_preserve: default_tau_preserve() }
    }
}

/// Denominators below this are skipped in the TL/TG ratios.
pub const RATIO_GUARD: f64 = 1e-6;
/// Ratios above this are flagged (reported, not clamped).
pub const RATIO_FLAG: f64 = 1.05;

/// One row of metric values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub tl_id: f64,
    pub tg_id: f64,
    pub id_preserve: f64,
    pub tacr: f64,
    pub napr: f64,
}

impl MetricValues {
    pub fn csv_header() -> &'static str {
        "tl_id,tg_id,id_preserve,tacr,napr"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.tl_id, self.tg_id, self.id_preserve, self.tacr, self.napr
        )
    }
}

/// Mean of a set of metric rows, in the order given.
pub fn mean_values(rows: &[MetricValues]) -> MetricValues {
    let n = rows.len().max(1) as f64;
    let mut acc = MetricValues { tl_id: 0.0, tg_id: 0.0, id_preserve: 0.0, tacr: 0.0, napr: 0.0 };
    for r in rows {
        acc.tl_id += r.tl_id;
        acc.tg_id += r.tg_id;
        acc.id_preserve += r.id_preserve;
        acc.tacr += r.tacr;
        acc.napr += r.napr;
    }
    acc.tl_id /= n;
    acc.tg_id /= n;
    acc.id_preserve /= n;
    acc.tacr /= n;
    acc.napr /= n;
    acc
}

fn check_lengths(orig: &SyntheticVideo, edited: &[Observation]) -> Result<()> {
    if orig.frames.len() != edited.len() {
        return Err(EditKitError::Data(format!(
            "video {} has {} frames but {} edited frames",
            orig.video_id,
            orig.frames.len(),
            edited.len()
        )));
    }
    Ok(())
}

/// Mean per-frame identity cosine similarity between original and edited
/// frames.
pub fn id_preserve(gt: &GroundTruth, orig: &SyntheticVideo, edited: &[Observation]) -> Result<f64> {
    check_lengths(orig, edited)?;
    let mut acc = 0.0;
    for (f, f_hat) in orig.frames.iter().zip(edited.iter()) {
        acc += cosine(&gt.identity_embed(f)?, &gt.identity_embed(f_hat)?);
    }
    Ok(acc / orig.frames.len() as f64)
}

/// TL-ID and TG-ID plus the pair bookkeeping of the ratio guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalId {
    pub tl_id: f64,
    pub tg_id: f64,
    /// Pairs skipped because |sim_orig| < RATIO_GUARD.
    pub skipped_pairs: usize,
    /// Ratios above RATIO_FLAG (reported raw, never clamped).
    pub flagged_ratios: usize,
}

/// Identity-consistency ratios of the edited video against the original.
pub fn temporal_id(
    gt: &GroundTruth,
    orig: &SyntheticVideo,
    edited: &[Observation],
) -> Result<TemporalId> {
    check_lengths(orig, edited)?;
    let n = orig.frames.len();
    if n < 2 {
        return Err(EditKitError::Data(format!(
            "video {} needs at least 2 frames for temporal metrics",
            orig.video_id
        )));
    }
    let e_orig: Vec<Vec<f64>> = orig
        .frames
        .iter()
        .map(|f| gt.identity_embed(f))
        .collect::<Result<_>>()?;
    let e_edit: Vec<Vec<f64>> = edited
        .iter()
        .map(|f| gt.identity_embed(f))
        .collect::<Result<_>>()?;
    let mut skipped = 0usize;
    let mut flagged = 0usize;
    let mut ratio = |i: usize, j: usize| -> Option<f64> {
        let sim_orig = cosine(&e_orig[i], &e_orig[j]);
        if sim_orig.abs() < RATIO_GUARD {
            skipped += 1;
            return None;
        }
        let r = cosine(&e_edit[i], &e_edit[j]) / sim_orig;
        if r > RATIO_FLAG {
            flagged += 1;
        }
        Some(r)
    };
    let mut tl_sum = 0.0;
    let mut tl_n = 0usize;
    for i in 0..n - 1 {
        if let Some(r) = ratio(i, i + 1) {
            tl_sum += r;
            tl_n += 1;
        }
    }
    let mut tg_sum = 0.0;
    let mut tg_n = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if let Some(r) = ratio(i, j) {
                tg_sum += r;
                tg_n += 1;
            }
        }
    }
    // All pairs degenerate cannot occur on generated worlds; report the
    // neutral ratio if it somehow does.
    let tl_id = if tl_n > 0 { tl_sum / tl_n as f64 } else { 1.0 };
    let tg_id = if tg_n > 0 { tg_sum / tg_n as f64 } else { 1.0 };
    Ok(TemporalId { tl_id, tg_id, skipped_pairs: skipped, flagged_ratios: flagged })
}

/// Fraction of frames whose target logit moved by at least `tau_change` in
/// the direction of `sign`.
pub fn tacr(
    gt: &GroundTruth,
    orig: &SyntheticVideo,
    edited: &[Observation],
    target: usize,
    sign: f64,
    tau_change: f64,
) -> Result<f64> {
    check_lengths(orig, edited)?;
    let mut hits = 0usize;
    for (f, f_hat) in orig.frames.iter().zip(edited.iter()) {
        let lo = gt.attr_logits(f)?;
        let le = gt.attr_logits(f_hat)?;
        if (le[target] - lo[target]) * sign >= tau_change {
            hits += 1;
        }
    }
    Ok(hits as f64 / orig.frames.len() as f64)
}

/// Fraction of frames whose non-target logits all changed by at most
/// `tau_preserve` in absolute value.
pub fn napr(
    gt: &GroundTruth,
    orig: &SyntheticVideo,
    edited: &[Observation],
    target: usize,
    tau_preserve: f64,
) -> Result<f64> {
    check_lengths(orig, edited)?;
    let mut hits = 0usize;
    for (f, f_hat) in orig.frames.iter().zip(edited.iter()) {
        let lo = gt.attr_logits(f)?;
        let le = gt.attr_logits(f_hat)?;
        let worst = lo
            .iter()
            .zip(le.iter())
            .enumerate()
            .filter(|(j, _)| *j != target)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0_f64, f64::max);
        if worst <= tau_preserve {
            hits += 1;
        }
    }
    Ok(hits as f64 / orig.frames.len() as f64)
}

/// Metrics of one (video, edit) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub values: MetricValues,
    pub skipped_pairs: usize,
    pub flagged_ratios: usize,
}

/// All five metrics for one original video and its edited frames.
pub fn pair_metrics(
    gt: &GroundTruth,
    orig: &SyntheticVideo,
    edited: &[Observation],
    target: usize,
    sign: f64,
    cfg: &MetricConfig,
) -> Result<PairMetrics> {
    let temporal = temporal_id(gt, orig, edited)?;
    let values = MetricValues {
        tl_id: temporal.tl_id,
        tg_id: temporal.tg_id,
        id_preserve: id_preserve(gt, orig, edited)?,
        tacr: tacr(gt, orig, edited, target, sign, cfg.tau_change)?,
        napr: napr(gt, orig, edited, target, cfg.tau_preserve)?,
    };
    Ok(PairMetrics {
        values,
        skipped_pairs: temporal.skipped_pairs,
        flagged_ratios: temporal.flagged_ratios,
    })
}

/// One evaluated (video, edit) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub video_id: usize,
    pub attr: usize,
    pub gamma: f64,
    pub sign: f64,
    pub seen: bool,
    pub values: MetricValues,
    pub skipped_pairs: usize,
    pub flagged_ratios: usize,
}

/// Per-video aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoMetrics {
    pub video_id: usize,
    pub values: MetricValues,
}

/// Full evaluation output: aggregate, per-video breakdown, per-cell
/// breakdown, and optional seen/unseen aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub aggregate: MetricValues,
    pub per_video: Vec<VideoMetrics>,
    pub cells: Vec<CellMetrics>,
    pub seen: Option<MetricValues>,
    pub unseen: Option<MetricValues>,
    pub config: MetricConfig,
    pub skipped_pairs: usize,
    pub flagged_ratios: usize,
}

impl MetricReport {
    /// Builds a report from evaluated cells. Cells are sorted canonically
    /// so aggregate values do not depend on evaluation order.
    pub fn from_cells(mut cells: Vec<CellMetrics>, config: MetricConfig) -> MetricReport {
        cells.sort_by(|a, b| {
            (a.video_id, a.attr, a.sign as i64)
                .cmp(&(b.video_id, b.attr, b.sign as i64))
                .then(a.gamma.partial_cmp(&b.gamma).unwrap())
        });
        let mut video_ids: Vec<usize> = cells.iter().map(|c| c.video_id).collect();
        video_ids.sort_unstable();
        video_ids.dedup();
        let per_video: Vec<VideoMetrics> = video_ids
            .iter()
            .map(|&vid| {
                let rows: Vec<MetricValues> = cells
                    .iter()
                    .filter(|c| c.video_id == vid)
                    .map(|c| c.values)
                    .collect();
                VideoMetrics { video_id: vid, values: mean_values(&rows) }
            })
            .collect();
        let aggregate = mean_values(&per_video.iter().map(|v| v.values).collect::<Vec<_>>());
        let seen_rows: Vec<MetricValues> =
            cells.iter().filter(|c| c.seen).map(|c| c.values).collect();
        let unseen_rows: Vec<MetricValues> =
            cells.iter().filter(|c| !c.seen).map(|c| c.values).collect();
        let seen = if unseen_rows.is_empty() { None } else { Some(mean_values(&seen_rows)) };
        let unseen = if unseen_rows.is_empty() { None } else { Some(mean_values(&unseen_rows)) };
        MetricReport {
            aggregate,
            per_video,
            skipped_pairs: cells.iter().map(|c| c.skipped_pairs).sum(),
            flagged_ratios: cells.iter().map(|c| c.flagged_ratios).sum(),
            cells,
            seen,
            unseen,
            config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{generate_world, Dataset, WorldSpec};

    fn small_world() -> Dataset {
        Dataset::generate(&WorldSpec {
            latent_dim: 16,
            num_attributes: 8,
            num_identities: 3,
            frames_per_video: 5,
            region_count: 4,
            seed: 42,
            bundle_count: 2,
            train_videos: 2,
            val_videos: 1,
            ..WorldSpec::default()
        })
        .unwrap()
    }

    #[test]
    fn no_op_editor_hits_exact_values() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let cfg = MetricConfig::default();
        for video in ds.videos.train.iter().chain(ds.videos.val.iter()) {
            let edited = video.frames.clone();
            let pm = pair_metrics(gt, video, &edited, 3, 1.0, &cfg).unwrap();
            assert_eq!(pm.values.tl_id, 1.0);
            assert_eq!(pm.values.tg_id, 1.0);
            assert_eq!(pm.values.id_preserve, 1.0);
            assert_eq!(pm.values.tacr, 0.0);
            assert_eq!(pm.values.napr, 1.0);
            assert_eq!(pm.skipped_pairs, 0);
        }
    }

    #[test]
    fn id_preserve_zero_for_orthogonal_identities() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let video = &ds.videos.train[0];
        // Construct edited frames whose identity embedding is orthogonal to
        // the original.
        let orig_id = gt.identity_embed(&video.frames[0]).unwrap();
        let edited: Vec<Vec<f64>> = video
            .true_latents
            .iter()
            .map(|l| {
                let mut z = l.clone();
                // Swap energy into a coordinate orthogonal to the original
                // identity vector.
                let s = gt.identity_start;
                for i in 0..gt.identity_dim {
                    z[s + i] = 0.0;
                }
                // Build any vector orthogonal to orig_id.
                let mut v = vec![0.0; gt.identity_dim];
                v[0] = -orig_id[1];
                v[1] = orig_id[0];
                for i in 0..gt.identity_dim {
                    z[s + i] = v[i];
                }
                gt.decode_latent(&z).unwrap()
            })
            .collect();
        let got = id_preserve(gt, video, &edited).unwrap();
        assert!(got.abs() < 1e-9, "got {got}");
    }

    #[test]
    fn id_preserve_matches_per_frame_loop_oracle() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let video = &ds.videos.train[0];
        let other = &ds.videos.train[1];
        let edited = other.frames[..video.frames.len()].to_vec();
        let got = id_preserve(gt, video, &edited).unwrap();
        let mut want = 0.0;
        for (f, g) in video.frames.iter().zip(edited.iter()) {
            let a = gt.identity_embed(f).unwrap();
            let b = gt.identity_embed(g).unwrap();
            let (mut d, mut na, mut nb) = (0.0, 0.0, 0.0);
            for i in 0..a.len() {
                d += a[i] * b[i];
                na += a[i] * a[i];
                nb += b[i] * b[i];
            }
            want += d / (na.sqrt() * nb.sqrt());
        }
        want /= video.frames.len() as f64;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn id_preserve_length_mismatch_is_data_error() {
        let ds = small_world();
        let video = &ds.videos.train[0];
        let edited = video.frames[..2].to_vec();
        assert!(matches!(
            id_preserve(&ds.ground_truth, video, &edited),
            Err(EditKitError::Data(_))
        ));
    }

    #[test]
    fn temporal_id_requires_two_frames() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let mut video = ds.videos.train[0].clone();
        video.frames.truncate(1);
        video.true_latents.truncate(1);
        let edited = video.frames.clone();
        assert!(matches!(temporal_id(gt, &video, &edited), Err(EditKitError::Data(_))));
    }

    #[test]
    fn tg_id_matches_hand_enumerated_three_frame_pairs() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let mut video = ds.videos.train[0].clone();
        video.frames.truncate(3);
        video.true_latents.truncate(3);
        // Edited frames with drifting identity: scale identity coords per
        // frame so similarities are nontrivial.
        let edited: Vec<Vec<f64>> = video
            .true_latents
            .iter()
            .enumerate()
            .map(|(t, l)| {
                let mut z = l.clone();
                let s = gt.identity_start;
                // Rotate within the identity plane (0, 1) by a per-frame
                // angle so cosines differ across pairs.
                let angle = 0.3 * t as f64;
                let (a, b) = (z[s], z[s + 1]);
                z[s] = a * angle.cos() - b * angle.sin();
                z[s + 1] = a * angle.sin() + b * angle.cos();
                gt.decode_latent(&z).unwrap()
            })
            .collect();
        let got = temporal_id(gt, &video, &edited).unwrap();
        // Hand enumeration of the three pairs (0,1), (0,2), (1,2).
        let eo: Vec<Vec<f64>> =
            video.frames.iter().map(|f| gt.identity_embed(f).unwrap()).collect();
        let ee: Vec<Vec<f64>> = edited.iter().map(|f| gt.identity_embed(f).unwrap()).collect();
        let r = |i: usize, j: usize| cosine(&ee[i], &ee[j]) / cosine(&eo[i], &eo[j]);
        let tg_want = (r(0, 1) + r(0, 2) + r(1, 2)) / 3.0;
        let tl_want = (r(0, 1) + r(1, 2)) / 2.0;
        assert!((got.tg_id - tg_want).abs() < 1e-12);
        assert!((got.tl_id - tl_want).abs() < 1e-12);
    }

    #[test]
    fn identity_preserving_edit_keeps_temporal_ratios_at_one() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let video = &ds.videos.val[0];
        let edited = gt.oracle_edit_video(video, 2, 0.9, 1.0).unwrap();
        let got = temporal_id(gt, video, &edited).unwrap();
        assert!((got.tl_id - 1.0).abs() < 1e-9);
        assert!((got.tg_id - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tacr_threshold_cases() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let video = &ds.videos.train[0];
        let tau = 0.25;
        assert_eq!(tacr(gt, video, &video.frames, 0, 1.0, tau).unwrap(), 0.0);
        // Raise the target logit by 2 tau in every frame.
        let edited = gt.oracle_edit_video(video, 0, 1.0, 1.0).unwrap();
        // gamma = 1.0 moves the logit by 1.0 >= 2 * 0.25.
        assert_eq!(tacr(gt, video, &edited, 0, 1.0, tau).unwrap(), 1.0);
        // Wrong sign counts nothing.
        assert_eq!(tacr(gt, video, &edited, 0, -1.0, tau).unwrap(), 0.0);
    }

    #[test]
    fn napr_threshold_cases() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let video = &ds.videos.train[1];
        let tau = 0.1;
        assert_eq!(napr(gt, video, &video.frames, 0, tau).unwrap(), 1.0);
        // Shift a non-target attribute by 2 tau in every frame.
        let edited = gt.oracle_edit_video(video, 3, 0.2, 1.0).unwrap();
        assert_eq!(napr(gt, video, &edited, 0, tau).unwrap(), 0.0);
    }

    #[test]
    fn tacr_and_napr_match_loop_and_count_oracle() {
        use rand::{Rng, SeedableRng};
        let ds = small_world();
        let gt = &ds.ground_truth;
        let video = &ds.videos.train[0];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // Random per-frame perturbations of the true latents.
        let edited: Vec<Vec<f64>> = video
            .true_latents
            .iter()
            .map(|l| {
                let mut z = l.clone();
                for j in 0..gt.num_attributes() {
                    let delta: f64 = rng.random_range(-0.4..0.4);
                    for (zi, ai) in z.iter_mut().zip(gt.attr_directions[j].iter()) {
                        *zi += delta * ai;
                    }
                }
                gt.decode_latent(&z).unwrap()
            })
            .collect();
        let cfg = MetricConfig::default();
        let target = 2;
        let got_tacr = tacr(gt, video, &edited, target, 1.0, cfg.tau_change).unwrap();
        let got_napr = napr(gt, video, &edited, target, cfg.tau_preserve).unwrap();
        let (mut tacr_hits, mut napr_hits) = (0usize, 0usize);
        for (f, f_hat) in video.frames.iter().zip(edited.iter()) {
            let lo = gt.attr_logits(f).unwrap();
            let le = gt.attr_logits(f_hat).unwrap();
            if le[target] - lo[target] >= cfg.tau_change {
                tacr_hits += 1;
            }
            let mut ok = true;
            for j in 0..lo.len() {
                if j != target && (lo[j] - le[j]).abs() > cfg.tau_preserve {
                    ok = false;
                }
            }
            if ok {
                napr_hits += 1;
            }
        }
        let n = video.frames.len() as f64;
        assert_eq!(got_tacr, tacr_hits as f64 / n);
        assert_eq!(got_napr, napr_hits as f64 / n);
    }

    #[test]
    fn tacr_monotone_in_gamma_with_oracle_editor() {
        let (gt, videos) = generate_world(&WorldSpec::default()).unwrap();
        let video = &videos.val[0];
        let cfg = MetricConfig::default();
        for target in [0usize, 9, 17] {
            let mut prev = 0.0;
            for gamma in [0.1, 0.25, 0.5, 0.75, 1.0] {
                let edited = gt.oracle_edit_video(video, target, gamma, 1.0).unwrap();
                let t = tacr(&gt, video, &edited, target, 1.0, cfg.tau_change).unwrap();
                assert!(t >= prev, "gamma {gamma}: tacr fell {prev} -> {t}");
                prev = t;
            }
            assert_eq!(prev, 1.0);
        }
    }

    #[test]
    fn oracle_editor_on_default_world_is_faithful_and_preserving() {
        let (gt, videos) = generate_world(&WorldSpec::default()).unwrap();
        let cfg = MetricConfig::default();
        for video in &videos.val {
            for target in 0..gt.num_attributes() {
                let edited = gt.oracle_edit_video(video, target, 1.0, 1.0).unwrap();
                let pm = pair_metrics(&gt, video, &edited, target, 1.0, &cfg).unwrap();
                assert_eq!(pm.values.tacr, 1.0, "target {target}");
                assert_eq!(pm.values.napr, 1.0, "target {target}");
                assert!((pm.values.id_preserve - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn report_aggregates_equal_mean_of_per_video_and_are_order_stable() {
        let ds = small_world();
        let gt = &ds.ground_truth;
        let cfg = MetricConfig::default();
        let mut cells = Vec::new();
        for video in ds.videos.train.iter().chain(ds.videos.val.iter()) {
            for target in [0usize, 4] {
                let edited = gt.oracle_edit_video(video, target, 0.8, 1.0).unwrap();
                let pm = pair_metrics(gt, video, &edited, target, 1.0, &cfg).unwrap();
                cells.push(CellMetrics {
                    video_id: video.video_id,
                    attr: target,
                    gamma: 0.8,
                    sign: 1.0,
                    seen: true,
                    values: pm.values,
                    skipped_pairs: pm.skipped_pairs,
                    flagged_ratios: pm.flagged_ratios,
                });
            }
        }
        let report = MetricReport::from_cells(cells.clone(), cfg);
        // Aggregate equals the mean of the per-video rows.
        let want = mean_values(&report.per_video.iter().map(|v| v.values).collect::<Vec<_>>());
        assert_eq!(report.aggregate, want);
        // Shuffled cell order produces the identical report.
        cells.reverse();
        cells.rotate_left(2);
        let report2 = MetricReport::from_cells(cells, cfg);
        assert_eq!(report, report2);
    }
}
