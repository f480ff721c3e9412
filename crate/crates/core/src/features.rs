//! Numeric encoding of proof patches.
//!
//! Each of the first `patch_len` (default 5) steps of a proof becomes a
//! block of eight slots:
//!
//! | slot | content |
//! |------|---------|
//! | 1 | tactic names, decimal-folded: `Σ code(tᵢ)·10^-(i-1)` |
//! | 2 | number of tactics |
//! | 3 | argument kinds, decimal-folded over the first 6 arguments |
//! | 4 | argument relation (0 none, 1 hypotheses, 2 lemmas, 3 mixed, 4 inductive) |
//! | 5–7 | codes of the root, leftmost child and second child of the goal |
//! | 8 | subgoals produced, or −1 when unknown |
//!
//! Steps past the end of the proof are zero blocks.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::parser::{ArgKind, LemmaRecord, ProofStep, TermTree};

pub const SLOTS_PER_STEP: usize = 8;
pub const DEFAULT_PATCH_LEN: usize = 5;
pub const FEATURES_FORMAT: &str = "proofmine features v1";
const MAX_FOLDED_ARGUMENTS: usize = 6;

/// Vocabulary codes. Codes follow lexicographic order from 1; 0 means
/// absent or unknown.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingTable {
    pub tactic_codes: BTreeMap<String, u32>,
    pub symbol_codes: BTreeMap<String, u32>,
}

/// Fixed code of an argument kind.
pub fn kind_code(kind: ArgKind) -> u32 {
    match kind {
        ArgKind::Wildcard => 0,
        ArgKind::Hypothesis => 1,
        ArgKind::ExternalLemma => 2,
        ArgKind::InductiveHypothesis => 3,
        ArgKind::NumericConstant => 4,
        ArgKind::TermExpr => 5,
        ArgKind::IntroPattern => 6,
    }
}

fn number(words: impl IntoIterator<Item = String>) -> BTreeMap<String, u32> {
    let mut codes: BTreeMap<String, u32> = words.into_iter().map(|w| (w, 0)).collect();
    for (i, code) in codes.values_mut().enumerate() {
        *code = i as u32 + 1;
    }
    codes
}

impl EncodingTable {
    pub fn tactic_code(&self, name: &str) -> u32 {
        self.tactic_codes.get(name).copied().unwrap_or(0)
    }

    pub fn symbol_code(&self, symbol: &str) -> u32 {
        self.symbol_codes.get(symbol).copied().unwrap_or(0)
    }

    /// SHA-256 of the table's JSON form, hex encoded.
    pub fn version_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("table serializes");
        hex::encode(Sha256::digest(&json))
    }
}

fn lemma_symbols(lemma: &LemmaRecord) -> impl Iterator<Item = &str> {
    lemma.statement.symbols().into_iter().chain(
        lemma
            .steps
            .iter()
            .filter_map(|s| s.goal_before.as_ref())
            .flat_map(TermTree::symbols),
    )
}

/// Collect tactic and symbol vocabularies over `corpus`.
pub fn build_encoding_table<'a, I>(corpus: I) -> Result<EncodingTable>
where
    I: IntoIterator<Item = &'a LemmaRecord>,
{
    let mut tactics = Vec::new();
    let mut symbols = Vec::new();
    let mut any = false;
    for lemma in corpus {
        any = true;
        for step in &lemma.steps {
            tactics.extend(step.tactics.iter().map(|t| t.name.clone()));
        }
        symbols.extend(lemma_symbols(lemma).map(str::to_string));
    }
    if !any {
        return Err(Error::EmptyCorpus);
    }
    Ok(EncodingTable {
        tactic_codes: number(tactics),
        symbol_codes: number(symbols),
    })
}

fn decimal_fold(codes: impl IntoIterator<Item = u32>) -> f64 {
    codes
        .into_iter()
        .enumerate()
        .map(|(i, c)| c as f64 * 10f64.powi(-(i as i32)))
        .fold(0.0, |acc, x| acc + x)
}

fn relation_code(step: &ProofStep) -> f64 {
    let mut hyp = false;
    let mut lemma = false;
    for a in step.arguments() {
        match a.kind {
            ArgKind::InductiveHypothesis => return 4.0,
            ArgKind::Hypothesis => hyp = true,
            ArgKind::ExternalLemma => lemma = true,
            _ => {}
        }
    }
    match (hyp, lemma) {
        (false, false) => 0.0,
        (true, false) => 1.0,
        (false, true) => 2.0,
        (true, true) => 3.0,
    }
}

/// Encode one proof step into its eight slots.
///
/// `statement` stands in for the goal of step 1 when the step carries none.
pub fn encode_step(
    step: &ProofStep,
    table: &EncodingTable,
    statement: &TermTree,
) -> [f64; SLOTS_PER_STEP] {
    let goal = step
        .goal_before
        .as_ref()
        .or((step.index == 1).then_some(statement));
    let tops = goal.map(TermTree::top_symbols).unwrap_or([None; 3]);
    let sym = |s: Option<&str>| s.map_or(0.0, |s| table.symbol_code(s) as f64);
    [
        decimal_fold(step.tactics.iter().map(|t| table.tactic_code(&t.name))),
        step.tactics.len() as f64,
        decimal_fold(
            step.arguments()
                .take(MAX_FOLDED_ARGUMENTS)
                .map(|a| kind_code(a.kind)),
        ),
        relation_code(step),
        sym(tops[0]),
        sym(tops[1]),
        sym(tops[2]),
        step.subgoals_after.map_or(-1.0, f64::from),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block(&self, step: usize) -> &[f64] {
        &self.values[step * SLOTS_PER_STEP..(step + 1) * SLOTS_PER_STEP]
    }
}

/// Feature vector over the first five steps.
pub fn extract_features(lemma: &LemmaRecord, table: &EncodingTable) -> Result<FeatureVector> {
    extract_features_with(lemma, table, DEFAULT_PATCH_LEN)
}

pub fn extract_features_with(
    lemma: &LemmaRecord,
    table: &EncodingTable,
    patch_len: usize,
) -> Result<FeatureVector> {
    if lemma.steps.is_empty() {
        return Err(Error::NoProofBody(lemma.name.clone()));
    }
    let mut values = vec![0.0; patch_len * SLOTS_PER_STEP];
    for (block, step) in values
        .chunks_exact_mut(SLOTS_PER_STEP)
        .zip(lemma.steps.iter())
    {
        block.copy_from_slice(&encode_step(step, table, &lemma.statement));
    }
    Ok(FeatureVector { values })
}

/// Min-max scale every dimension to `[0, 1]`; constant dimensions map to 0.
pub fn min_max_scale(vectors: &[FeatureVector]) -> Vec<FeatureVector> {
    let Some(dim) = vectors.first().map(FeatureVector::len) else {
        return Vec::new();
    };
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for v in vectors {
        for (d, &x) in v.values.iter().enumerate() {
            lo[d] = lo[d].min(x);
            hi[d] = hi[d].max(x);
        }
    }
    vectors
        .iter()
        .map(|v| FeatureVector {
            values: v
                .values
                .iter()
                .enumerate()
                .map(|(d, &x)| {
                    let range = hi[d] - lo[d];
                    if range > 0.0 {
                        ((x - lo[d]) / range).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub name: String,
    pub library: String,
    pub raw: Vec<f64>,
    pub scaled: Vec<f64>,
    pub table_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FeaturesHeader {
    format: String,
    patch_len: usize,
    records: usize,
}

/// The objects handed to clustering: one scaled vector per lemma.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureDatabase {
    pub patch_len: usize,
    pub records: Vec<FeatureRecord>,
}

impl FeatureDatabase {
    /// Build from `(name, library, raw vector)` triples; scaling is done
    /// over exactly these entries.
    pub fn from_raw(
        patch_len: usize,
        table_version: &str,
        entries: Vec<(String, String, FeatureVector)>,
    ) -> Self {
        let raws: Vec<FeatureVector> = entries.iter().map(|e| e.2.clone()).collect();
        let scaled = min_max_scale(&raws);
        let records = entries
            .into_iter()
            .zip(scaled)
            .map(|((name, library, raw), scaled)| FeatureRecord {
                name,
                library,
                raw: raw.values,
                scaled: scaled.values,
                table_version: table_version.to_string(),
            })
            .collect();
        Self { patch_len, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.scaled.clone()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.records.iter().position(|r| r.name == name)
    }

    /// Write as JSON Lines: a header line followed by one record per lemma.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let header = FeaturesHeader {
            format: FEATURES_FORMAT.to_string(),
            patch_len: self.patch_len,
            records: self.records.len(),
        };
        serde_json::to_writer(&mut out, &header)?;
        writeln!(out).map_err(|e| Error::io("<features>", e))?;
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            writeln!(out).map_err(|e| Error::io("<features>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header: FeaturesHeader = match lines.next() {
            Some(l) => serde_json::from_str(&l.map_err(|e| Error::io("<features>", e))?)
                .map_err(|e| Error::CorruptFile(e.to_string()))?,
            None => return Err(Error::CorruptFile("empty features file".into())),
        };
        if header.format != FEATURES_FORMAT {
            return Err(Error::VersionMismatch {
                found: header.format,
                expected: FEATURES_FORMAT.into(),
            });
        }
        let mut records = Vec::with_capacity(header.records);
        for l in lines {
            let l = l.map_err(|e| Error::io("<features>", e))?;
            if l.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&l).map_err(|e| Error::CorruptFile(e.to_string()))?);
        }
        if records.len() != header.records {
            return Err(Error::CorruptFile(format!(
                "expected {} records, found {}",
                header.records,
                records.len()
            )));
        }
        Ok(Self {
            patch_len: header.patch_len,
            records,
        })
    }
}
