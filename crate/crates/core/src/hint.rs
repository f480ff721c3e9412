//! Hints for an unfinished proof: the query is clustered together with the
//! corpus and the most reliable consensus cluster containing it is returned.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::digest::{run_digest, select_reliable, DigestConfig};
use crate::error::{Error, Result};
use crate::features::extract_features_with;
use crate::parser::{parse_partial, LemmaRecord};

/// Name under which the query enters the digest. `?` cannot start a Coq
/// identifier, so it never collides with a corpus lemma.
pub const QUERY_ID: &str = "?query";
pub const QUERY_LIBRARY: &str = "?query";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintMember {
    pub name: String,
    pub library: String,
    pub proximity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hint {
    pub frequency: f64,
    pub query_proximity: f64,
    /// Corpus lemmas of the cluster, by decreasing proximity.
    pub members: Vec<HintMember>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoHintReason {
    /// No tactic or symbol of the query occurs in the corpus.
    NoSharedVocabulary,
    /// The query ended up in no consensus cluster.
    NotClustered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum HintOutcome {
    Found(Hint),
    NoReliableCluster { reason: NoHintReason },
}

fn shares_vocabulary(corpus: &Corpus, query: &LemmaRecord) -> bool {
    let t = &corpus.table;
    query
        .steps
        .iter()
        .flat_map(|s| &s.tactics)
        .any(|a| t.tactic_codes.contains_key(&a.name))
        || query
            .statement
            .symbols()
            .into_iter()
            .any(|s| t.symbol_codes.contains_key(s))
}

/// Cluster `query` with the corpus and pick its most reliable cluster.
pub fn hint(corpus: &Corpus, query: &LemmaRecord, cfg: &DigestConfig) -> Result<HintOutcome> {
    cfg.validate()?;
    if query.steps.is_empty() {
        return Err(Error::NoProofBody(query.name.clone()));
    }
    if corpus.lemma_count() == 0 {
        return Err(Error::TooFewLemmas(0));
    }
    if !shares_vocabulary(corpus, query) {
        return Ok(HintOutcome::NoReliableCluster {
            reason: NoHintReason::NoSharedVocabulary,
        });
    }
    let v = extract_features_with(query, &corpus.table, corpus.patch_len)?;
    let db = corpus.database_with(vec![(QUERY_ID.into(), QUERY_LIBRARY.into(), v)]);
    let digest = run_digest(&db, cfg)?;
    let Some(cluster) = select_reliable(&digest.clusters, QUERY_ID) else {
        return Ok(HintOutcome::NoReliableCluster {
            reason: NoHintReason::NotClustered,
        });
    };
    let mut members: Vec<HintMember> = cluster
        .members
        .iter()
        .filter(|m| *m != QUERY_ID)
        .map(|m| HintMember {
            name: m.clone(),
            library: cluster.member_library[m].clone(),
            proximity: cluster.member_proximity[m],
        })
        .collect();
    members.sort_by(|a, b| {
        b.proximity
            .total_cmp(&a.proximity)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(HintOutcome::Found(Hint {
        frequency: cluster.frequency,
        query_proximity: cluster.member_proximity[QUERY_ID],
        members,
    }))
}

/// Parse an unfinished proof (no `Qed.` needed) and run [`hint`].
pub fn hint_source(corpus: &Corpus, source: &str, cfg: &DigestConfig) -> Result<HintOutcome> {
    let query = parse_partial(source, QUERY_LIBRARY)?;
    hint(corpus, &query, cfg)
}

impl HintOutcome {
    pub fn render_text(&self) -> String {
        match self {
            HintOutcome::Found(h) => {
                let mut out = format!(
                    "most reliable cluster: frequency {:.3}, query proximity {:.3}\n",
                    h.frequency, h.query_proximity
                );
                for m in &h.members {
                    out.push_str(&format!(
                        "  {:<32} {:<16} {:.3}\n",
                        m.name, m.library, m.proximity
                    ));
                }
                out
            }
            HintOutcome::NoReliableCluster { reason } => {
                let why = match reason {
                    NoHintReason::NoSharedVocabulary => {
                        "query shares no vocabulary with the corpus"
                    }
                    NoHintReason::NotClustered => "query is in no consensus cluster",
                };
                format!("no reliable cluster ({why})\n")
            }
        }
    }
}
