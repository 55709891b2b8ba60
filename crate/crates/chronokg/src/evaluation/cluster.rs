//! Disease-trajectory clustering: standardized features, seeded k-means
//! with farthest-point initialization, silhouette-based model selection.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TemporalTriple;
use crate::store::median;

/// Temporal signature of one disease.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFeatures {
    pub disease: String,
    pub median_onset: f64,
    pub onset_spread: f64,
    pub stage_count: f64,
    pub milestone_density: f64,
    pub onset_fraction: f64,
}

impl TrajectoryFeatures {
    fn vector(&self) -> [f64; 5] {
        [
            self.median_onset,
            self.onset_spread,
            self.stage_count,
            self.milestone_density,
            self.onset_fraction,
        ]
    }
}

/// Features for one disease from its validated triples: median onset of
/// the earliest phenotype midpoints, onset spread (max - min), distinct
/// stage count, milestone-bearing fraction, onset-bearing fraction.
pub fn trajectory_features(disease: &str, triples: &[&TemporalTriple]) -> Option<TrajectoryFeatures> {
    if triples.is_empty() {
        return None;
    }
    let onsets: Vec<(f64, f64)> = triples.iter().filter_map(|t| t.onset_range()).collect();
    if onsets.is_empty() {
        return None;
    }
    let mids: Vec<f64> = onsets.iter().map(|(lo, hi)| (lo + hi) / 2.0).collect();
    let min = onsets.iter().map(|o| o.0).fold(f64::INFINITY, f64::min);
    let max = onsets.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
    let mut stages: Vec<&str> = triples
        .iter()
        .filter_map(|t| t.temporal.progression_stage.as_deref())
        .collect();
    stages.sort();
    stages.dedup();
    let milestones = triples.iter().filter(|t| t.temporal.milestone.is_some()).count();
    Some(TrajectoryFeatures {
        disease: disease.to_string(),
        median_onset: median(&mids).unwrap(),
        onset_spread: max - min,
        stage_count: stages.len() as f64,
        milestone_density: milestones as f64 / triples.len() as f64,
        onset_fraction: onsets.len() as f64 / triples.len() as f64,
    })
}

/// Output of one clustering sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterReport {
    pub chosen_k: Option<usize>,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// (k, mean silhouette) for every k tried.
    pub silhouette_per_k: Vec<(usize, f64)>,
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

fn standardize(rows: &[[f64; 5]]) -> Vec<[f64; 5]> {
    let n = rows.len() as f64;
    let mut means = [0.0f64; 5];
    for row in rows {
        for d in 0..5 {
            means[d] += row[d] / n;
        }
    }
    let mut stds = [0.0f64; 5];
    for row in rows {
        for d in 0..5 {
            stds[d] += (row[d] - means[d]).powi(2) / n;
        }
    }
    for s in &mut stds {
        *s = s.sqrt();
    }
    rows.iter()
        .map(|row| {
            let mut out = [0.0f64; 5];
            for d in 0..5 {
                out[d] = if stds[d] > 0.0 { (row[d] - means[d]) / stds[d] } else { 0.0 };
            }
            out
        })
        .collect()
}

fn dist2(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    (0..5).map(|d| (a[d] - b[d]).powi(2)).sum()
}

/// Greedy farthest-point init: seeded first pick, then repeatedly the
/// point farthest from its nearest chosen centroid (lowest index wins
/// ties).
fn farthest_point_init(points: &[[f64; 5]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 5]> {
    let mut centroids = vec![points[rng.random_range(0..points.len())]];
    while centroids.len() < k {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, p) in points.iter().enumerate() {
            let nearest = centroids.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min);
            if nearest > best.1 {
                best = (i, nearest);
            }
        }
        centroids.push(points[best.0]);
    }
    centroids
}

fn kmeans(points: &[[f64; 5]], k: usize, seed: u64) -> (Vec<usize>, Vec<[f64; 5]>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = farthest_point_init(points, k, &mut rng);
    let mut assignments = vec![0usize; points.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let nearest = (0..k)
                .min_by(|&a, &b| dist2(p, &centroids[a]).partial_cmp(&dist2(p, &centroids[b])).unwrap())
                .unwrap();
            if assignments[i] != nearest {
                assignments[i] = nearest;
                changed = true;
            }
        }
        let mut sums = vec![[0.0f64; 5]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assignments[i]] += 1;
            for d in 0..5 {
                sums[assignments[i]][d] += p[d];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed an empty cluster with the point farthest from
                // its centroid.
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        dist2(&points[a], &centroids[assignments[a]])
                            .partial_cmp(&dist2(&points[b], &centroids[assignments[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centroids[c] = points[far];
                changed = true;
            } else {
                for d in 0..5 {
                    centroids[c][d] = sums[c][d] / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (assignments, centroids)
}

/// Mean silhouette over all points (Euclidean). Singleton clusters score
/// zero; returns None when every pairwise distance is zero.
fn silhouette(points: &[[f64; 5]], assignments: &[usize], k: usize) -> Option<f64> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let any_spread = points
        .iter()
        .any(|p| dist2(p, &points[0]) > 0.0);
    if !any_spread {
        return None;
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = assignments[i];
        let own_size = assignments.iter().filter(|a| **a == own).count();
        if own_size <= 1 {
            continue;
        }
        let mut intra = 0.0;
        let mut inter = vec![(0.0f64, 0usize); k];
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = dist2(&points[i], &points[j]).sqrt();
            if assignments[j] == own {
                intra += d;
            }
            inter[assignments[j]].0 += d;
            inter[assignments[j]].1 += 1;
        }
        let a = intra / (own_size - 1) as f64;
        let b = inter
            .iter()
            .enumerate()
            .filter(|(c, (_, cnt))| *c != own && *cnt > 0)
            .map(|(_, (sum, cnt))| sum / *cnt as f64)
            .fold(f64::INFINITY, f64::min);
        if b.is_finite() {
            total += (b - a) / a.max(b);
        }
    }
    Some(total / n as f64)
}

/// Seeded k-means sweep over `k_range`; the k with maximal mean silhouette
/// wins (smaller k on ties).
pub fn cluster_trajectories(
    features: &[TrajectoryFeatures],
    k_range: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<ClusterReport> {
    if features.is_empty() {
        return Err(Error::domain("clustering needs at least one feature row"));
    }
    let raw: Vec<[f64; 5]> = features.iter().map(TrajectoryFeatures::vector).collect();
    let points = standardize(&raw);

    let mut warnings = Vec::new();
    let max_k = *k_range.end();
    let k_hi = if features.len() < max_k {
        warnings.push(format!(
            "population {} smaller than max k {max_k}; restricting sweep",
            features.len()
        ));
        features.len().max(*k_range.start()).min(max_k)
    } else {
        max_k
    };
    let k_lo = (*k_range.start()).min(k_hi);

    type BestSweep = (usize, f64, Vec<usize>, Vec<[f64; 5]>);
    let mut best: Option<BestSweep> = None;
    let mut silhouette_per_k = Vec::new();
    let mut degenerate = false;
    for k in k_lo..=k_hi {
        if k < 2 || k > points.len() {
            continue;
        }
        let (assignments, centroids) = kmeans(&points, k, seed);
        match silhouette(&points, &assignments, k) {
            Some(s) => {
                silhouette_per_k.push((k, s));
                let better = match &best {
                    None => true,
                    Some((_, best_s, _, _)) => s > *best_s,
                };
                if better {
                    best = Some((k, s, assignments, centroids));
                }
            }
            None => degenerate = true,
        }
    }

    match best {
        Some((k, _, assignments, centroids)) => Ok(ClusterReport {
            chosen_k: Some(k),
            assignments,
            centroids: centroids.into_iter().map(|c| c.to_vec()).collect(),
            silhouette_per_k,
            degenerate: false,
            warnings,
        }),
        None => Ok(ClusterReport {
            chosen_k: None,
            assignments: vec![0; features.len()],
            centroids: Vec::new(),
            silhouette_per_k,
            degenerate,
            warnings,
        }),
    }
}
