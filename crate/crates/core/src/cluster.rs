//! K-means over attribute embeddings and nearest-centroid routing.
//!
//! Attributes are clustered once, the centroids are frozen, and every edit
//! request — including embeddings that were never clustered — is dispatched
//! to the transformation of its nearest centroid. Ties always break to the
//! lowest index so results are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EditKitError, Result};

/// Default number of seeded Lloyd restarts; the best objective wins.
pub const KMEANS_RESTARTS: usize = 10;

/// Frozen nearest-centroid dispatcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRouter {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster of each fitted embedding, by position in the fitted slice.
    pub assignment: Vec<usize>,
    pub k: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(c, point);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn wcss(points: &[Vec<f64>], centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment.iter())
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

/// Greedy k-means++ seeding: the first centroid is uniform; each later one
/// is chosen among several distance-weighted candidates as the candidate
/// that reduces the total potential the most.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    let candidates = 2 + (k as f64).ln().ceil() as usize;
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let mut best_idx = None;
        let mut best_potential = f64::INFINITY;
        for _ in 0..candidates {
            let idx = if total <= 0.0 {
                // All mass on chosen points (duplicates); fall back to uniform.
                rng.random_range(0..points.len())
            } else {
                let mut target = rng.random_range(0.0..total);
                let mut idx = points.len() - 1;
                for (i, &w) in d2.iter().enumerate() {
                    if target < w {
                        idx = i;
                        break;
                    }
                    target -= w;
                }
                idx
            };
            let potential: f64 = points
                .iter()
                .zip(d2.iter())
                .map(|(p, &d)| d.min(sq_dist(p, &points[idx])))
                .sum();
            if potential < best_potential {
                best_potential = potential;
                best_idx = Some(idx);
            }
        }
        let next = best_idx.unwrap();
        centroids.push(points[next].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[next]));
        }
    }
    centroids
}

struct LloydRun {
    centroids: Vec<Vec<f64>>,
    assignment: Vec<usize>,
    wcss: f64,
    wcss_history: Vec<f64>,
}

fn lloyd(points: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut ChaCha8Rng) -> LloydRun {
    let dim = points[0].len();
    let mut centroids = seed_centroids(points, k, rng);
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(&centroids, p)).collect();
    let mut history = vec![wcss(points, &centroids, &assignment)];
    for _ in 0..max_iter {
        // Update step: means of assigned points; empty clusters re-seed from
        // the point farthest from its current centroid.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(assignment.iter()) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for s in sums[c].iter_mut() {
                    *s /= counts[c] as f64;
                }
                centroids[c] = sums[c].clone();
            } else {
                // Re-seed from the point farthest from its own centroid.
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, sq_dist(p, &centroids[assignment[i]])))
                    .fold((0, f64::NEG_INFINITY), |acc, (i, d)| {
                        if d > acc.1 {
                            (i, d)
                        } else {
                            acc
                        }
                    })
                    .0;
                centroids[c] = points[far].clone();
            }
        }
        let new_assignment: Vec<usize> = points.iter().map(|p| nearest(&centroids, p)).collect();
        history.push(wcss(points, &centroids, &new_assignment));
        let stable = new_assignment == assignment;
        assignment = new_assignment;
        if stable {
            break;
        }
    }
    let obj = wcss(points, &centroids, &assignment);
    LloydRun { centroids, assignment, wcss: obj, wcss_history: history }
}

/// Fits K-means with [`KMEANS_RESTARTS`] seeded restarts and returns the
/// router of the best run plus that run's per-iteration objective history.
pub fn fit_kmeans_detailed(
    embeddings: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<(ClusterRouter, Vec<f64>)> {
    let m = embeddings.len();
    if m == 0 {
        return Err(EditKitError::Data("no embeddings to cluster".into()));
    }
    if k == 0 || k > m {
        return Err(EditKitError::Config(format!(
            "cluster count {k} must be in 1..={m}"
        )));
    }
    let dim = embeddings[0].len();
    if embeddings.iter().any(|e| e.len() != dim) {
        return Err(EditKitError::Shape("embeddings have mixed dimensions".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<LloydRun> = None;
    for _ in 0..KMEANS_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let run = lloyd(embeddings, k, max_iter, &mut rng);
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    let best = best.unwrap();
    let router = ClusterRouter {
        centroids: best.centroids,
        assignment: best.assignment,
        k,
    };
    Ok((router, best.wcss_history))
}

/// Lloyd's algorithm with k-means++ seeding and restarts.
pub fn fit_kmeans(
    embeddings: &[Vec<f64>],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterRouter> {
    Ok(fit_kmeans_detailed(embeddings, k, seed, max_iter)?.0)
}

impl ClusterRouter {
    /// A single-cluster router whose centroid is the embedding mean.
    pub fn degenerate(embeddings: &[Vec<f64>]) -> Result<ClusterRouter> {
        fit_kmeans(embeddings, 1, 0, 1)
    }

    /// Nearest-centroid dispatch for any embedding of the right dimension,
    /// fitted or not. Ties break to the lowest cluster index.
    pub fn route(&self, embedding: &[f64]) -> Result<usize> {
        let dim = self.centroids[0].len();
        if embedding.len() != dim {
            return Err(EditKitError::Shape(format!(
                "route: embedding dim {} != centroid dim {}",
                embedding.len(),
                dim
            )));
        }
        Ok(nearest(&self.centroids, embedding))
    }

    /// Within-cluster sum of squares of the fitted embeddings.
    pub fn fitted_wcss(&self, embeddings: &[Vec<f64>]) -> f64 {
        wcss(embeddings, &self.centroids, &self.assignment)
    }
}

/// True when two assignments induce the same partition up to relabeling.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = std::collections::BTreeMap::new();
    let mut bwd = std::collections::BTreeMap::new();
    for (&x, &y) in a.iter().zip(b.iter()) {
        if *fwd.entry(x).or_insert(y) != y || *bwd.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}
