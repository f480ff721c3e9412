//! Consensus over many seeded clustering runs.
//!
//! Two lemmas are linked when they share a label in at least a fraction τ
//! of the runs; consensus clusters are the connected components of that
//! graph with two or more members.

use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{choose_n, ClusterAlgorithm, GranularityConfig};
use crate::error::{Error, Result};
use crate::features::FeatureDatabase;

pub const DIGEST_FORMAT: &str = "proofmine digest v1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigestConfig {
    pub algorithm: ClusterAlgorithm,
    pub granularity: u8,
    pub runs: usize,
    pub frequency_threshold: f64,
    pub seed: u64,
}

impl Default for DigestConfig {
    fn default() -> Self {
        Self {
            algorithm: ClusterAlgorithm::Kmeans,
            granularity: 3,
            runs: 200,
            frequency_threshold: 0.6,
            seed: 0,
        }
    }
}

impl DigestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if !(self.frequency_threshold > 0.0 && self.frequency_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "frequency threshold must be in (0, 1], got {}",
                self.frequency_threshold
            )));
        }
        GranularityConfig::new(self.granularity, 1)?;
        Ok(())
    }

    /// Seed of run `i`: the master seed plus `i`.
    pub fn run_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Homogeneity {
    Homogeneous,
    Heterogeneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusCluster {
    /// Sorted lemma names.
    pub members: Vec<String>,
    pub frequency: f64,
    pub member_proximity: BTreeMap<String, f64>,
    /// Library tag of each member.
    pub member_library: BTreeMap<String, String>,
    pub homogeneity: Homogeneity,
}

impl ConsensusCluster {
    pub fn mean_proximity(&self) -> f64 {
        if self.member_proximity.is_empty() {
            return 0.0;
        }
        self.member_proximity.values().sum::<f64>() / self.member_proximity.len() as f64
    }

    pub fn score(&self) -> f64 {
        self.frequency * self.mean_proximity()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.members
            .binary_search_by(|m| m.as_str().cmp(name))
            .is_ok()
    }
}

/// Labels and proximities of one clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub run: usize,
    pub labels: Vec<usize>,
    pub proximity: Vec<f64>,
}

/// Pairwise co-labelling counts over a set of runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoOccurrence {
    m: usize,
    runs: usize,
    counts: Vec<u32>,
}

impl CoOccurrence {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            runs: 0,
            counts: vec![0; m * m],
        }
    }

    pub fn from_runs<'a>(m: usize, labels: impl IntoIterator<Item = &'a [usize]>) -> Self {
        let mut c = Self::new(m);
        for l in labels {
            c.add_run(l);
        }
        c
    }

    pub fn add_run(&mut self, labels: &[usize]) {
        assert_eq!(labels.len(), self.m);
        for a in 0..self.m {
            for b in 0..self.m {
                if labels[a] == labels[b] {
                    self.counts[a * self.m + b] += 1;
                }
            }
        }
        self.runs += 1;
    }

    /// Combine counts of two disjoint sets of runs.
    pub fn merge(mut self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.runs += other.runs;
        self
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn count(&self, a: usize, b: usize) -> u32 {
        self.counts[a * self.m + b]
    }

    /// Fraction of runs in which `a` and `b` share a label.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        if self.runs == 0 {
            return 0.0;
        }
        self.count(a, b) as f64 / self.runs as f64
    }

    /// Components of the graph with edges where `get(a, b) ≥ tau`, keeping
    /// those of size ≥ 2. Each component is sorted; components are ordered
    /// by their smallest index.
    pub fn components(&self, tau: f64) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(self.m);
        for a in 0..self.m {
            for b in a + 1..self.m {
                if self.get(a, b) >= tau {
                    uf.union(a, b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..self.m {
            groups.entry(uf.find(a)).or_default().push(a);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().filter(|g| g.len() >= 2).collect();
        out.sort_by_key(|g| g[0]);
        out
    }

    /// Mean co-occurrence over all member pairs.
    pub fn frequency(&self, members: &[usize]) -> f64 {
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                sum += self.get(a, b);
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            sum / pairs as f64
        }
    }
}

/// The full result of a digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Digest {
    pub format: String,
    pub config: DigestConfig,
    pub objects: usize,
    pub n_clusters: usize,
    pub clusters: Vec<ConsensusCluster>,
}

impl Digest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
        }
        let header: Header =
            serde_json::from_str(text).map_err(|e| Error::CorruptFile(e.to_string()))?;
        if header.format != DIGEST_FORMAT {
            return Err(Error::VersionMismatch {
                found: header.format,
                expected: DIGEST_FORMAT.into(),
            });
        }
        serde_json::from_str(text).map_err(|e| Error::CorruptFile(e.to_string()))
    }
}

/// Execute the configured runs in parallel; the result is ordered by run.
pub fn run_clusterings(
    points: &[Vec<f64>],
    n: usize,
    cfg: &DigestConfig,
) -> Result<Vec<RunOutcome>> {
    (0..cfg.runs)
        .into_par_iter()
        .map(|i| {
            let a = cfg.algorithm.run(points, n, cfg.run_seed(i))?;
            Ok(RunOutcome {
                run: i,
                labels: a.labels,
                proximity: a.proximity,
            })
        })
        .collect()
}

/// Cluster the database `cfg.runs` times and reduce to consensus clusters.
pub fn run_digest(db: &FeatureDatabase, cfg: &DigestConfig) -> Result<Digest> {
    cfg.validate()?;
    if db.len() < 2 {
        return Err(Error::TooFewLemmas(db.len()));
    }
    let n = choose_n(GranularityConfig::new(cfg.granularity, db.len())?);
    let outcomes = run_clusterings(&db.points(), n, cfg)?;
    Ok(digest_from_runs(db, cfg, n, outcomes))
}

/// Most frequent label among `members` in one run; ties go to the lowest.
fn majority_label(labels: &[usize], members: &[usize]) -> usize {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in members {
        *counts.entry(labels[i]).or_default() += 1;
    }
    let mut best = (0, 0);
    for (label, c) in counts {
        if c > best.1 {
            best = (label, c);
        }
    }
    best.0
}

/// Reduce run outcomes to a digest. Outcomes may arrive in any order.
pub fn digest_from_runs(
    db: &FeatureDatabase,
    cfg: &DigestConfig,
    n: usize,
    mut outcomes: Vec<RunOutcome>,
) -> Digest {
    outcomes.sort_by_key(|o| o.run);
    let m = db.len();
    let co = CoOccurrence::from_runs(m, outcomes.iter().map(|o| o.labels.as_slice()));
    let tags: HashMap<&str, &str> = db
        .records
        .iter()
        .map(|r| (r.name.as_str(), r.library.as_str()))
        .collect();

    let mut clusters: Vec<ConsensusCluster> = co
        .components(cfg.frequency_threshold)
        .into_iter()
        .map(|members| {
            let mut sums = vec![0.0; members.len()];
            let mut hits = vec![0usize; members.len()];
            for o in &outcomes {
                let major = majority_label(&o.labels, &members);
                for (k, &i) in members.iter().enumerate() {
                    if o.labels[i] == major {
                        sums[k] += o.proximity[i];
                        hits[k] += 1;
                    }
                }
            }
            let mut named: Vec<(String, f64)> = members
                .iter()
                .enumerate()
                .map(|(k, &i)| {
                    let p = if hits[k] == 0 {
                        0.0
                    } else {
                        sums[k] / hits[k] as f64
                    };
                    (db.records[i].name.clone(), p)
                })
                .collect();
            named.sort_by(|a, b| a.0.cmp(&b.0));
            let member_library: BTreeMap<String, String> = named
                .iter()
                .map(|(n, _)| (n.clone(), tags[n.as_str()].to_string()))
                .collect();
            let libs: std::collections::BTreeSet<&String> = member_library.values().collect();
            let homogeneity = if libs.len() == 1 {
                Homogeneity::Homogeneous
            } else {
                Homogeneity::Heterogeneous
            };
            ConsensusCluster {
                members: named.iter().map(|(n, _)| n.clone()).collect(),
                frequency: co.frequency(&members),
                member_library,
                member_proximity: named.into_iter().collect(),
                homogeneity,
            }
        })
        .collect();
    sort_clusters(&mut clusters);
    Digest {
        format: DIGEST_FORMAT.into(),
        config: *cfg,
        objects: m,
        n_clusters: n,
        clusters,
    }
}

/// Frequency descending, then smallest member name.
pub fn sort_clusters(clusters: &mut [ConsensusCluster]) {
    clusters.sort_by(|a, b| {
        b.frequency
            .total_cmp(&a.frequency)
            .then_with(|| a.members[0].cmp(&b.members[0]))
    });
}

/// The cluster containing `lemma` with the best frequency × mean proximity.
pub fn select_reliable<'a>(
    clusters: &'a [ConsensusCluster],
    lemma: &str,
) -> Option<&'a ConsensusCluster> {
    clusters
        .iter()
        .filter(|c| c.contains(lemma))
        .min_by(|a, b| {
            b.score()
                .total_cmp(&a.score())
                .then_with(|| b.frequency.total_cmp(&a.frequency))
                .then_with(|| a.members[0].cmp(&b.members[0]))
        })
}

/// Homogeneous iff every member carries the same library tag.
pub fn classify_homogeneity(
    cluster: &ConsensusCluster,
    library_tags: &HashMap<String, String>,
) -> Result<Homogeneity> {
    let mut tag: Option<&str> = None;
    let mut mixed = false;
    for m in &cluster.members {
        let t = library_tags
            .get(m)
            .ok_or_else(|| Error::UnknownLemma(m.clone()))?;
        match tag {
            None => tag = Some(t),
            Some(prev) if prev != t => mixed = true,
            _ => {}
        }
    }
    Ok(if mixed {
        Homogeneity::Heterogeneous
    } else {
        Homogeneity::Homogeneous
    })
}
