use std::f64::consts::PI;

use super::{check_input, kmeans, ClusterAssignment};
use crate::error::Result;

pub const EM_MAX_ITER: usize = 200;
pub const EM_TOLERANCE: f64 = 1e-6;
pub const VARIANCE_FLOOR: f64 = 1e-6;

/// A fitted diagonal-covariance Gaussian mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    /// Posterior of each component for each point; rows sum to 1.
    pub responsibilities: Vec<Vec<f64>>,
    /// Log-likelihood at each E-step.
    pub log_likelihood: Vec<f64>,
}

fn log_density(p: &[f64], mean: &[f64], var: &[f64]) -> f64 {
    p.iter()
        .zip(mean)
        .zip(var)
        .map(|((x, m), v)| -0.5 * (2.0 * PI * v).ln() - (x - m) * (x - m) / (2.0 * v))
        .sum()
}

/// Fills `resp` and returns the log-likelihood.
fn e_step(
    points: &[Vec<f64>],
    weights: &[f64],
    means: &[Vec<f64>],
    variances: &[Vec<f64>],
    resp: &mut [Vec<f64>],
) -> f64 {
    let mut total = 0.0;
    for (p, row) in points.iter().zip(resp.iter_mut()) {
        for (k, r) in row.iter_mut().enumerate() {
            *r = if weights[k] > 0.0 {
                weights[k].ln() + log_density(p, &means[k], &variances[k])
            } else {
                f64::NEG_INFINITY
            };
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = row.iter().map(|l| (l - max).exp()).sum();
        let lse = max + sum.ln();
        for r in row.iter_mut() {
            *r = (*r - lse).exp();
        }
        let norm: f64 = row.iter().sum();
        for r in row.iter_mut() {
            *r /= norm;
        }
        total += lse;
    }
    total
}

fn m_step(
    points: &[Vec<f64>],
    resp: &[Vec<f64>],
    weights: &mut [f64],
    means: &mut [Vec<f64>],
    variances: &mut [Vec<f64>],
) {
    let dim = points[0].len();
    for k in 0..weights.len() {
        let nk: f64 = resp.iter().map(|r| r[k]).sum();
        weights[k] = nk / points.len() as f64;
        if nk <= 1e-12 {
            continue;
        }
        let mut mean = vec![0.0; dim];
        for (p, r) in points.iter().zip(resp) {
            for (m, x) in mean.iter_mut().zip(p) {
                *m += r[k] * x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= nk);
        let mut var = vec![0.0; dim];
        for (p, r) in points.iter().zip(resp) {
            for ((v, x), m) in var.iter_mut().zip(p).zip(&mean) {
                *v += r[k] * (x - m) * (x - m);
            }
        }
        var.iter_mut()
            .for_each(|v| *v = (*v / nk).max(VARIANCE_FLOOR));
        means[k] = mean;
        variances[k] = var;
    }
}

/// EM for a diagonal Gaussian mixture started from one k-means pass.
pub fn fit_gaussian_mixture(points: &[Vec<f64>], n: usize, seed: u64) -> Result<GaussianMixture> {
    check_input(points, n)?;
    let init = kmeans(points, n, seed)?;
    let dim = points[0].len();
    let mut counts = vec![0usize; n];
    for &l in &init.labels {
        counts[l] += 1;
    }
    let mut means = init.centers;
    let mut variances = vec![vec![0.0; dim]; n];
    for (p, &l) in points.iter().zip(&init.labels) {
        for ((v, x), m) in variances[l].iter_mut().zip(p).zip(&means[l]) {
            *v += (x - m) * (x - m);
        }
    }
    for (var, &c) in variances.iter_mut().zip(&counts) {
        var.iter_mut()
            .for_each(|v| *v = (*v / c.max(1) as f64).max(VARIANCE_FLOOR));
    }
    let total: usize = counts.iter().map(|&c| c.max(1)).sum();
    let mut weights: Vec<f64> = counts
        .iter()
        .map(|&c| c.max(1) as f64 / total as f64)
        .collect();

    let mut resp = vec![vec![0.0; n]; points.len()];
    let mut log_likelihood = Vec::new();
    let mut iterations = 0;
    loop {
        let ll = e_step(points, &weights, &means, &variances, &mut resp);
        let converged = log_likelihood
            .last()
            .is_some_and(|&prev: &f64| ll - prev < EM_TOLERANCE);
        log_likelihood.push(ll);
        if converged || iterations == EM_MAX_ITER {
            break;
        }
        m_step(points, &resp, &mut weights, &mut means, &mut variances);
        iterations += 1;
    }
    Ok(GaussianMixture {
        weights,
        means,
        variances,
        responsibilities: resp,
        log_likelihood,
    })
}

/// Hard assignment from [`fit_gaussian_mixture`]: label = most responsible
/// component, proximity = its responsibility.
pub fn em_gaussian(points: &[Vec<f64>], n: usize, seed: u64) -> Result<ClusterAssignment> {
    let fit = fit_gaussian_mixture(points, n, seed)?;
    let mut labels = Vec::with_capacity(points.len());
    let mut proximity = Vec::with_capacity(points.len());
    for row in &fit.responsibilities {
        let mut best = 0;
        for (k, &r) in row.iter().enumerate() {
            if r > row[best] {
                best = k;
            }
        }
        labels.push(best);
        proximity.push(row[best].clamp(0.0, 1.0));
    }
    Ok(ClusterAssignment {
        labels,
        centers: fit.means,
        proximity,
        objective: *fit.log_likelihood.last().expect("at least one E-step"),
        trace: fit.log_likelihood,
    })
}
