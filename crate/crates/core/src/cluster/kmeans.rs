use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_input, distance_proximity, nearest, sq_dist, ClusterAssignment};
use crate::error::Result;

pub const KMEANS_MAX_ITER: usize = 100;

/// Lloyd's algorithm from `n` distinct points drawn with `seed`.
pub fn kmeans(points: &[Vec<f64>], n: usize, seed: u64) -> Result<ClusterAssignment> {
    check_input(points, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = sample(&mut rng, points.len(), n)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();
    kmeans_from(points, init)
}

fn assign(points: &[Vec<f64>], centers: &[Vec<f64>]) -> Vec<usize> {
    points.iter().map(|p| nearest(p, centers)).collect()
}

fn sum_of_squares(points: &[Vec<f64>], labels: &[usize], centers: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum()
}

/// Means of the labelled groups. Empty groups keep their old center and
/// are then re-seeded with the point farthest from its own center.
fn update(points: &[Vec<f64>], labels: &[usize], centers: &mut [Vec<f64>]) {
    let dim = points[0].len();
    let n = centers.len();
    let mut sums = vec![vec![0.0; dim]; n];
    let mut counts = vec![0usize; n];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for j in 0..n {
        if counts[j] > 0 {
            centers[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
        }
    }
    let mut used = vec![false; points.len()];
    for j in (0..n).filter(|&j| counts[j] == 0) {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = sq_dist(p, &centers[labels[i]]);
            if d > 0.0 && best.is_none_or(|(_, bd)| d > bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            used[i] = true;
            centers[j] = points[i].clone();
        }
    }
}

/// Lloyd's algorithm from explicit initial centers.
///
/// `trace[0]` is the objective of the initial assignment.
pub fn kmeans_from(points: &[Vec<f64>], initial: Vec<Vec<f64>>) -> Result<ClusterAssignment> {
    check_input(points, initial.len())?;
    let mut centers = initial;
    let mut labels = assign(points, &centers);
    let mut trace = vec![sum_of_squares(points, &labels, &centers)];
    for _ in 0..KMEANS_MAX_ITER {
        update(points, &labels, &mut centers);
        let next = assign(points, &centers);
        trace.push(sum_of_squares(points, &next, &centers));
        if next == labels {
            break;
        }
        labels = next;
    }
    let objective = sum_of_squares(points, &labels, &centers);
    Ok(ClusterAssignment {
        proximity: distance_proximity(points, &labels, &centers),
        labels,
        centers,
        objective,
        trace,
    })
}
