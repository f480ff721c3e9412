use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_input, dist, distance_proximity, nearest, ClusterAssignment};
use crate::error::Result;

/// Greedy max-min center indices starting from `first`.
///
/// Each next center is the unchosen point farthest from its nearest chosen
/// center; ties go to the lowest index.
pub fn farthest_first_centers(points: &[Vec<f64>], n: usize, first: usize) -> Vec<usize> {
    let mut chosen = vec![first];
    let mut is_chosen = vec![false; points.len()];
    is_chosen[first] = true;
    let mut min_d: Vec<f64> = points.iter().map(|p| dist(p, &points[first])).collect();
    while chosen.len() < n.min(points.len()) {
        let mut best: Option<usize> = None;
        for i in 0..points.len() {
            if !is_chosen[i] && best.is_none_or(|b| min_d[i] > min_d[b]) {
                best = Some(i);
            }
        }
        let next = best.expect("unchosen point remains");
        chosen.push(next);
        is_chosen[next] = true;
        for (i, p) in points.iter().enumerate() {
            min_d[i] = min_d[i].min(dist(p, &points[next]));
        }
    }
    chosen
}

/// FarthestFirst traversal from a seeded random first center.
pub fn farthest_first(points: &[Vec<f64>], n: usize, seed: u64) -> Result<ClusterAssignment> {
    check_input(points, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..points.len());
    let centers: Vec<Vec<f64>> = farthest_first_centers(points, n, first)
        .into_iter()
        .map(|i| points[i].clone())
        .collect();
    let labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
    let objective = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| dist(p, &centers[l]))
        .fold(0.0, f64::max);
    Ok(ClusterAssignment {
        proximity: distance_proximity(points, &labels, &centers),
        labels,
        centers,
        objective,
        trace: vec![objective],
    })
}
