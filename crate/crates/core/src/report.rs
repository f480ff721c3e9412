//! Human-readable and JSON renderings of a digest.

use std::fmt::Write;
use std::str::FromStr;

use crate::digest::{ConsensusCluster, Digest, Homogeneity};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidConfig(format!("unknown report format `{s}`"))),
        }
    }
}

pub fn render(digest: &Digest, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Text => Ok(render_text(digest)),
        ReportFormat::Json => Ok(digest.to_json()? + "\n"),
    }
}

fn render_cluster(out: &mut String, rank: usize, c: &ConsensusCluster) {
    let libs: std::collections::BTreeSet<&str> =
        c.member_library.values().map(String::as_str).collect();
    let libs: Vec<&str> = libs.into_iter().collect();
    let _ = writeln!(
        out,
        "  #{rank} frequency {:.3}, mean proximity {:.3}, libraries {}",
        c.frequency,
        c.mean_proximity(),
        libs.join(", ")
    );
    for m in &c.members {
        let _ = writeln!(
            out,
            "      {:<32} {:<16} {:.3}",
            m,
            c.member_library.get(m).map_or("?", String::as_str),
            c.member_proximity.get(m).copied().unwrap_or(0.0)
        );
    }
}

/// Clusters grouped into homogeneous and heterogeneous, each group in
/// digest order.
pub fn render_text(digest: &Digest) -> String {
    let cfg = &digest.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "objects: {}  n = {}  algorithm: {}  granularity: {}  runs: {}  threshold: {}  seed: {}",
        digest.objects,
        digest.n_clusters,
        cfg.algorithm,
        cfg.granularity,
        cfg.runs,
        cfg.frequency_threshold,
        cfg.seed
    );
    let _ = writeln!(out, "consensus clusters: {}", digest.clusters.len());
    for (title, kind) in [
        ("Homogeneous", Homogeneity::Homogeneous),
        ("Heterogeneous", Homogeneity::Heterogeneous),
    ] {
        let group: Vec<(usize, &ConsensusCluster)> = digest
            .clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.homogeneity == kind)
            .collect();
        let _ = writeln!(out, "\n{title} ({})", group.len());
        for (i, c) in group {
            render_cluster(&mut out, i + 1, c);
        }
    }
    out
}
