//! Multi-library corpora and their on-disk form.
//!
//! A corpus file is one JSON document:
//!
//! ```text
//! { "format": "proofmine corpus v1", "checksum": "<sha256 hex>", "body": { ... } }
//! ```
//!
//! The checksum covers the bytes of `body` exactly as stored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{
    build_encoding_table, extract_features_with, EncodingTable, FeatureDatabase, FeatureVector,
    DEFAULT_PATCH_LEN,
};
use crate::parser::{parse_library, parse_trace, LemmaRecord};

pub const CORPUS_FORMAT: &str = "proofmine corpus v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub version: String,
    pub patch_len: usize,
    pub libraries: BTreeMap<String, Vec<LemmaRecord>>,
    pub table: EncodingTable,
    pub features: BTreeMap<String, FeatureVector>,
}

impl Default for Corpus {
    fn default() -> Self {
        Self::new(DEFAULT_PATCH_LEN)
    }
}

impl Corpus {
    pub fn new(patch_len: usize) -> Self {
        Self {
            version: CORPUS_FORMAT.to_string(),
            patch_len,
            libraries: BTreeMap::new(),
            table: EncodingTable::default(),
            features: BTreeMap::new(),
        }
    }

    pub fn lemma_count(&self) -> usize {
        self.libraries.values().map(Vec::len).sum()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &LemmaRecord> {
        self.libraries.values().flatten()
    }

    pub fn lemma(&self, name: &str) -> Option<&LemmaRecord> {
        self.lemmas().find(|l| l.name == name)
    }

    /// Lemma name → library tag.
    pub fn library_tags(&self) -> HashMap<String, String> {
        self.lemmas()
            .map(|l| (l.name.clone(), l.library.clone()))
            .collect()
    }

    /// Add lemmas under `tag`, then rebuild the table and every vector.
    pub fn add_lemmas(mut self, tag: &str, lemmas: Vec<LemmaRecord>) -> Result<Self> {
        let mut seen: HashSet<String> = self.lemmas().map(|l| l.name.clone()).collect();
        for l in &lemmas {
            if !seen.insert(l.name.clone()) {
                return Err(Error::DuplicateLemmaName(l.name.clone()));
            }
        }
        self.libraries
            .entry(tag.to_string())
            .or_default()
            .extend(lemmas.into_iter().map(|mut l| {
                l.library = tag.to_string();
                l
            }));
        self.reindex()?;
        Ok(self)
    }

    fn reindex(&mut self) -> Result<()> {
        if self.lemma_count() == 0 {
            self.table = EncodingTable::default();
            self.features.clear();
            return Ok(());
        }
        self.table = build_encoding_table(self.lemmas())?;
        self.features = self
            .lemmas()
            .map(|l| {
                Ok((
                    l.name.clone(),
                    extract_features_with(l, &self.table, self.patch_len)?,
                ))
            })
            .collect::<Result<_>>()?;
        Ok(())
    }

    /// Raw vectors for every lemma, in name order, scaled together.
    pub fn feature_database(&self) -> FeatureDatabase {
        self.database_with(Vec::new())
    }

    /// Like [`Corpus::feature_database`] with extra objects appended before
    /// scaling.
    pub fn database_with(&self, extra: Vec<(String, String, FeatureVector)>) -> FeatureDatabase {
        let tags = self.library_tags();
        let mut entries: Vec<(String, String, FeatureVector)> = self
            .features
            .iter()
            .map(|(name, v)| (name.clone(), tags[name].clone(), v.clone()))
            .collect();
        entries.extend(extra);
        FeatureDatabase::from_raw(self.patch_len, &self.table.version_hash(), entries)
    }

    pub fn to_json(&self) -> Result<String> {
        let body = serde_json::to_string(self)?;
        let checksum = hex::encode(Sha256::digest(body.as_bytes()));
        Ok(format!(
            "{{\"format\":{},\"checksum\":\"{checksum}\",\"body\":{body}}}\n",
            serde_json::to_string(CORPUS_FORMAT)?
        ))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Envelope {
            format: String,
            checksum: String,
            body: Box<serde_json::value::RawValue>,
        }
        let env: Envelope =
            serde_json::from_str(text).map_err(|e| Error::CorruptFile(e.to_string()))?;
        if env.format != CORPUS_FORMAT {
            return Err(Error::VersionMismatch {
                found: env.format,
                expected: CORPUS_FORMAT.into(),
            });
        }
        let body = env.body.get();
        if hex::encode(Sha256::digest(body.as_bytes())) != env.checksum {
            return Err(Error::CorruptFile("checksum mismatch".into()));
        }
        let corpus: Corpus =
            serde_json::from_str(body).map_err(|e| Error::CorruptFile(e.to_string()))?;
        if corpus.version != CORPUS_FORMAT {
            return Err(Error::VersionMismatch {
                found: corpus.version,
                expected: CORPUS_FORMAT.into(),
            });
        }
        Ok(corpus)
    }
}

/// Whether `path` holds a trace file rather than a `.v` script.
fn is_trace(path: &Path, text: &str) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("jsonl") | Some("json")
    ) || text.trim_start().starts_with('{')
}

/// Read a `.v` script or a trace file, tagging each lemma with `tag`.
pub fn read_library(path: &Path, tag: &str) -> Result<Vec<LemmaRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed = if is_trace(path, &text) {
        parse_trace(&text, tag)
    } else {
        parse_library(&text, tag)
    };
    let mut lemmas = parsed.map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    for l in &mut lemmas {
        l.source_span.file = path.display().to_string();
    }
    Ok(lemmas)
}

/// Parse `paths[i]` under `tags[i]` and add everything to `corpus`.
pub fn ingest<P: AsRef<Path>, T: AsRef<str>>(
    paths: &[P],
    tags: &[T],
    corpus: Corpus,
) -> Result<Corpus> {
    if paths.len() != tags.len() {
        return Err(Error::InvalidConfig(format!(
            "{} paths but {} tags",
            paths.len(),
            tags.len()
        )));
    }
    let mut corpus = corpus;
    for (path, tag) in paths.iter().zip(tags) {
        let tag = tag.as_ref();
        if tag.is_empty() {
            return Err(Error::InvalidConfig("empty library tag".into()));
        }
        let lemmas = read_library(path.as_ref(), tag)?;
        corpus = corpus.add_lemmas(tag, lemmas)?;
    }
    Ok(corpus)
}

pub fn save(corpus: &Corpus, path: &Path) -> Result<()> {
    fs::write(path, corpus.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<Corpus> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::CorruptFile(e.to_string()))?;
    Corpus::from_json(&text)
}

/// Split a `tag:path` command-line argument.
pub fn parse_lib_arg(arg: &str) -> Result<(String, PathBuf)> {
    match arg.split_once(':') {
        Some((tag, path)) if !tag.is_empty() && !path.is_empty() => {
            Ok((tag.to_string(), PathBuf::from(path)))
        }
        _ => Err(Error::InvalidConfig(format!(
            "expected TAG:PATH, got `{arg}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const SEQ: &str = "Lemma has_map a s : has a (map f s) = has (preim f a) s.\n\
                       Proof. by elim: s => //= x s ->. Qed.\n\
                       Lemma all_map a s : all a (map f s) = all (preim f a) s.\n\
                       Proof. by elim: s => //= x s ->. Qed.\n";
    const NAT: &str = "Lemma addn0 : right_id 0 addn. Proof. by move=> n; apply/eqP. Qed.\n";

    fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::File::create(&p)
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
        p
    }

    #[test]
    fn ingest_save_load() {
        let dir = tempfile::tempdir().unwrap();
        let a = file(dir.path(), "seq.v", SEQ);
        let b = file(dir.path(), "nat.v", NAT);
        let c = ingest(&[&a, &b], &["seq", "ssrnat"], Corpus::default()).unwrap();
        assert_eq!(c.lemma_count(), 3);
        assert_eq!(c.features.len(), 3);
        assert_eq!(
            c.libraries.keys().collect::<Vec<_>>(),
            vec!["seq", "ssrnat"]
        );
        let out = dir.path().join("c.corpus");
        save(&c, &out).unwrap();
        assert_eq!(load(&out).unwrap(), c);
    }

    #[test]
    fn same_file_twice_is_a_duplicate() {
        let dir = tempfile::tempdir().unwrap();
        let a = file(dir.path(), "seq.v", SEQ);
        let err = ingest(&[&a, &a], &["x", "y"], Corpus::default()).unwrap_err();
        assert!(matches!(err, Error::DuplicateLemmaName(n) if n == "has_map"));
    }

    #[test]
    fn empty_ingest_is_identity() {
        let c = Corpus::default();
        let none: [&Path; 0] = [];
        let tags: [&str; 0] = [];
        assert_eq!(ingest(&none, &tags, c.clone()).unwrap(), c);
    }

    #[test]
    fn order_independent_database() {
        let dir = tempfile::tempdir().unwrap();
        let a = file(dir.path(), "seq.v", SEQ);
        let b = file(dir.path(), "nat.v", NAT);
        let ab = ingest(&[&a, &b], &["seq", "nat"], Corpus::default()).unwrap();
        let ba = ingest(&[&b, &a], &["nat", "seq"], Corpus::default()).unwrap();
        assert_eq!(ab.feature_database(), ba.feature_database());
    }

    #[test]
    fn parse_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let a = file(dir.path(), "bad.v", "Lemma x : y.\nProof. move.\n");
        let err = ingest(&[&a], &["t"], Corpus::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bad.v:"), "{err}");
    }

    #[test]
    fn missing_file_is_io() {
        let err = ingest(&["/nonexistent/x.v"], &["t"], Corpus::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn version_and_corruption() {
        let c = Corpus::default()
            .add_lemmas("t", parse_library(NAT, "t").unwrap())
            .unwrap();
        let text = c.to_json().unwrap();
        let v0 = text.replacen(CORPUS_FORMAT, "v0", 1);
        assert!(matches!(
            Corpus::from_json(&v0),
            Err(Error::VersionMismatch { .. })
        ));
        let cut = &text[..text.len() / 2];
        assert!(matches!(Corpus::from_json(cut), Err(Error::CorruptFile(_))));
        let tampered = text.replace("addn0", "addn1");
        assert!(matches!(
            Corpus::from_json(&tampered),
            Err(Error::CorruptFile(_))
        ));
    }

    #[test]
    fn lib_args() {
        assert_eq!(
            parse_lib_arg("ssr:a/b.v").unwrap(),
            ("ssr".into(), PathBuf::from("a/b.v"))
        );
        assert!(parse_lib_arg("nocolon").is_err());
        assert!(parse_lib_arg(":x").is_err());
    }
}
