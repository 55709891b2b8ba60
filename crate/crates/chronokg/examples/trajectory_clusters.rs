//! Disease-trajectory clustering: standardized temporal features, seeded
//! k-means with farthest-point init, silhouette-based choice of k.
//!
//! Run with `cargo run --example trajectory_clusters`.

use chronokg::evaluation::{cluster_trajectories, TrajectoryFeatures};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn archetype(
    name: &str,
    n: usize,
    onset: f64,
    spread: f64,
    milestones: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<TrajectoryFeatures> {
    (0..n)
        .map(|i| TrajectoryFeatures {
            disease: format!("{name}-{i:02}"),
            median_onset: onset + rng.random_range(-1.0..1.0),
            onset_spread: spread + rng.random_range(-2.0..2.0),
            stage_count: if spread > 30.0 { 3.0 } else { 1.0 },
            milestone_density: milestones,
            onset_fraction: 0.9,
        })
        .collect()
}

fn main() -> chronokg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // Three synthetic archetypes: congenital, broad-onset progressive,
    // late-onset.
    let mut features = archetype("congenital", 20, 0.5, 6.0, 0.2, &mut rng);
    features.extend(archetype("progressive", 20, 11.0, 60.0, 0.6, &mut rng));
    features.extend(archetype("late-onset", 20, 55.0, 15.0, 0.3, &mut rng));

    let report = cluster_trajectories(&features, 2..=6, 42)?;
    println!("silhouette per k:");
    for (k, s) in &report.silhouette_per_k {
        let marker = if Some(*k) == report.chosen_k { "  <- chosen" } else { "" };
        println!("  k = {k}: {s:.3}{marker}");
    }

    if report.chosen_k.is_some() {
        let mut sizes = std::collections::BTreeMap::new();
        for a in &report.assignments {
            *sizes.entry(a).or_insert(0usize) += 1;
        }
        println!("\ncluster sizes: {sizes:?}");
        for (cluster, centroid) in report.centroids.iter().enumerate() {
            println!(
                "  cluster {cluster}: standardized centroid (onset {:+.2}, spread {:+.2}, stages {:+.2}, milestones {:+.2}, onset-frac {:+.2})",
                centroid[0], centroid[1], centroid[2], centroid[3], centroid[4]
            );
        }
    }
    Ok(())
}
