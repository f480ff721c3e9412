//! K-means, diagonal Gaussian EM and FarthestFirst over dense points,
//! plus the granularity rule that picks the number of clusters.

mod em;
mod farthest;
mod kmeans;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use em::{
    em_gaussian, fit_gaussian_mixture, GaussianMixture, EM_MAX_ITER, EM_TOLERANCE, VARIANCE_FLOOR,
};
pub use farthest::{farthest_first, farthest_first_centers};
pub use kmeans::{kmeans, kmeans_from, KMEANS_MAX_ITER};

/// Result of one clustering run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub proximity: Vec<f64>,
    /// Sum of squares (k-means), log-likelihood (EM) or covering radius
    /// (FarthestFirst).
    pub objective: f64,
    /// Objective after each iteration, starting with the initial state.
    pub trace: Vec<f64>,
}

impl ClusterAssignment {
    pub fn n_clusters(&self) -> usize {
        self.centers.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterAlgorithm {
    #[default]
    Kmeans,
    Em,
    FarthestFirst,
}

impl ClusterAlgorithm {
    pub const ALL: [ClusterAlgorithm; 3] = [Self::Kmeans, Self::Em, Self::FarthestFirst];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Kmeans => "kmeans",
            Self::Em => "em",
            Self::FarthestFirst => "farthest-first",
        }
    }

    pub fn run(self, points: &[Vec<f64>], n: usize, seed: u64) -> Result<ClusterAssignment> {
        match self {
            Self::Kmeans => kmeans(points, n, seed),
            Self::Em => em_gaussian(points, n, seed),
            Self::FarthestFirst => farthest_first(points, n, seed),
        }
    }
}

impl fmt::Display for ClusterAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClusterAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// Granularity `g` (1..=5) and number of objects `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GranularityConfig {
    pub g: u8,
    pub m: usize,
}

impl GranularityConfig {
    pub fn new(g: u8, m: usize) -> Result<Self> {
        if !(1..=5).contains(&g) {
            return Err(Error::InvalidConfig(format!(
                "granularity must be in 1..=5, got {g}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("no objects to cluster".into()));
        }
        Ok(Self { g, m })
    }
}

/// `max(1, ⌊m / (10 − g)⌋)`.
pub fn choose_n(cfg: GranularityConfig) -> usize {
    (cfg.m / (10 - cfg.g as usize)).max(1)
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

/// Index of the nearest center; ties go to the lowest index.
pub(crate) fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(p, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// `1 − d / D` with `D` the largest point-to-own-center distance.
pub(crate) fn distance_proximity(
    points: &[Vec<f64>],
    labels: &[usize],
    centers: &[Vec<f64>],
) -> Vec<f64> {
    let d: Vec<f64> = points
        .iter()
        .zip(labels)
        .map(|(p, &l)| dist(p, &centers[l]))
        .collect();
    let max = d.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![1.0; d.len()];
    }
    d.iter().map(|x| (1.0 - x / max).clamp(0.0, 1.0)).collect()
}

pub(crate) fn check_input(points: &[Vec<f64>], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "number of clusters must be positive".into(),
        ));
    }
    if n > points.len() {
        return Err(Error::TooFewPoints {
            clusters: n,
            points: points.len(),
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidConfig("points differ in dimension".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig("non-finite coordinate".into()));
    }
    Ok(())
}
