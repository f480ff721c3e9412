#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use proofmine::parser::{parse_library, parse_partial, ArgKind, LemmaRecord};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn kind_letter(k: ArgKind) -> &'static str {
    match k {
        ArgKind::Hypothesis => "H",
        ArgKind::ExternalLemma => "L",
        ArgKind::InductiveHypothesis => "I",
        ArgKind::NumericConstant => "N",
        ArgKind::TermExpr => "T",
        ArgKind::Wildcard => "W",
        ArgKind::IntroPattern => "P",
    }
}

/// `"name K K"` rendering of every tactic of every step.
pub fn render_steps(lemma: &LemmaRecord) -> Vec<Vec<String>> {
    lemma
        .steps
        .iter()
        .map(|s| {
            s.tactics
                .iter()
                .map(|t| {
                    std::iter::once(t.name.as_str())
                        .chain(t.arguments.iter().map(|a| kind_letter(a.kind)))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect()
        })
        .collect()
}

pub struct GoldenReport {
    pub files: usize,
    pub lemmas: usize,
    pub steps: usize,
    pub mismatches: Vec<String>,
}

/// Parse every listing fixture and compare with the hand-labelled goldens.
pub fn check_listing_goldens() -> GoldenReport {
    let dir = fixtures().join("listings");
    let goldens: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("goldens.json")).unwrap()).unwrap();
    let mut report = GoldenReport {
        files: 0,
        lemmas: 0,
        steps: 0,
        mismatches: Vec::new(),
    };
    for (file, entry) in goldens["files"].as_object().unwrap() {
        report.files += 1;
        let src = fs::read_to_string(dir.join(file)).unwrap();
        let parsed = match entry["mode"].as_str().unwrap() {
            "partial" => parse_partial(&src, "fixture").map(|l| vec![l]),
            _ => parse_library(&src, "fixture"),
        };
        let parsed = match parsed {
            Ok(p) => p,
            Err(e) => {
                report.mismatches.push(format!("{file}: {e}"));
                continue;
            }
        };
        let expected = entry["lemmas"].as_array().unwrap();
        if parsed.len() != expected.len() {
            report.mismatches.push(format!(
                "{file}: {} lemmas parsed, {} expected",
                parsed.len(),
                expected.len()
            ));
        }
        for (lemma, want) in parsed.iter().zip(expected) {
            report.lemmas += 1;
            let name = want["name"].as_str().unwrap();
            if lemma.name != name {
                report.mismatches.push(format!(
                    "{file}: lemma `{}` where `{name}` expected",
                    lemma.name
                ));
            }
            let want_steps: Vec<Vec<String>> =
                serde_json::from_value(want["steps"].clone()).unwrap();
            report.steps += want_steps.len();
            let got = render_steps(lemma);
            if got != want_steps {
                report.mismatches.push(format!(
                    "{file}: {name}: got {got:?}, expected {want_steps:?}"
                ));
            }
        }
    }
    report
}

/// The hint scenario: four look-alike proofs hidden among three decoy
/// families, plus the unfinished query.
pub struct HintScenario {
    pub corpus: proofmine::corpus::Corpus,
    pub query: LemmaRecord,
    /// Lemma names per group; group 0 holds the targets.
    pub groups: Vec<Vec<String>>,
}

pub const TARGET_LIBS: [&str; 3] = ["matrix", "summation", "homology"];
pub const DECOY_LIBS: [&str; 3] = ["seq_decoys", "bool_decoys", "nat_decoys"];

pub fn hint_scenario() -> HintScenario {
    use proofmine::corpus::{ingest, Corpus};
    let dir = fixtures().join("hint");
    let tags: Vec<&str> = TARGET_LIBS.iter().chain(&DECOY_LIBS).copied().collect();
    let paths: Vec<PathBuf> = tags.iter().map(|t| dir.join(format!("{t}.v"))).collect();
    let corpus = ingest(&paths, &tags, Corpus::default()).unwrap();
    let names = |libs: &[&str]| -> Vec<String> {
        libs.iter()
            .flat_map(|t| corpus.libraries[*t].iter().map(|l| l.name.clone()))
            .collect()
    };
    let mut groups = vec![names(&TARGET_LIBS)];
    groups.extend(DECOY_LIBS.iter().map(|t| names(&[t])));
    let src = fs::read_to_string(fixtures().join("listings/sumfirstn.v")).unwrap();
    let query = parse_partial(&src, "query").unwrap();
    HintScenario {
        corpus,
        query,
        groups,
    }
}

use proofmine::corpus::Corpus;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const WORDS: [&str; 12] = [
    "addn", "muln", "subn", "cat", "rev", "map", "take", "drop", "size", "negb", "andb", "orb",
];

fn ident(rng: &mut ChaCha8Rng) -> String {
    format!(
        "{}{}",
        WORDS.choose(rng).unwrap(),
        ["C", "A", "0", "S", "K", "E"].choose(rng).unwrap()
    )
}

fn random_step(rng: &mut ChaCha8Rng) -> String {
    let t = match rng.random_range(0..9) {
        0 => "move=> m n".to_string(),
        1 => format!("rewrite {} {}", ident(rng), ident(rng)),
        2 => format!("rewrite {}", ident(rng)),
        3 => "case: m".to_string(),
        4 => "elim: s => [|x s IHs] //=".to_string(),
        5 => format!("apply: {}", ident(rng)),
        6 => format!("exact: ({} m)", ident(rng)),
        7 => "by []".to_string(),
        _ => "intros".to_string(),
    };
    if rng.random_bool(0.25) {
        format!("by {t}")
    } else {
        t
    }
}

fn random_statement(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..4) {
        0 => format!("{} m ({} s) = m", ident(rng), ident(rng)),
        1 => format!("forall x, {} x = x", ident(rng)),
        2 => format!("m <= n -> {} m n", ident(rng)),
        _ => format!("size ({} s) = size s", ident(rng)),
    }
}

/// Source of a random library whose lemmas are called `{prefix}{i}`.
pub fn random_library_source(rng: &mut ChaCha8Rng, prefix: &str, lemmas: usize) -> String {
    let mut out = String::new();
    for i in 0..lemmas {
        let steps = rng.random_range(1..=6);
        out.push_str(&format!(
            "Lemma {prefix}{i} m n s : {}.\nProof.\n",
            random_statement(rng)
        ));
        for _ in 0..steps {
            out.push_str(&random_step(rng));
            out.push_str(".\n");
        }
        out.push_str("Qed.\n\n");
    }
    out
}

/// A corpus of `2..=max_lemmas` random lemmas spread over up to three
/// libraries.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_lemmas: usize) -> Corpus {
    let m = rng.random_range(2..=max_lemmas);
    let libs = rng.random_range(1..=3usize.min(m));
    let mut corpus = Corpus::new(rng.random_range(1..=6));
    let mut left = m;
    for k in 0..libs {
        let take = if k + 1 == libs {
            left
        } else {
            rng.random_range(1..=left - (libs - k - 1))
        };
        left -= take;
        let tag = format!("lib{k}");
        let src = random_library_source(rng, &format!("{tag}_l"), take);
        corpus = corpus
            .add_lemmas(&tag, parse_library(&src, &tag).unwrap())
            .unwrap();
    }
    corpus
}

/// Four families of five proofs. Members of a family differ only in names
/// that the encoding abstracts away; families differ in tactic skeleton and
/// statement shape.
pub fn family_corpus(rng: &mut ChaCha8Rng) -> (Corpus, Vec<Vec<String>>) {
    let mut src = String::new();
    let mut families = vec![Vec::new(); 4];
    for i in 0..20 {
        let f = i % 4;
        let name = format!("fam{f}_{}{i}", ident(rng));
        let (g, l1, l2, l3) = (ident(rng), ident(rng), ident(rng), ident(rng));
        let lemma = match f {
            0 => format!(
                "Lemma {name} s : size ({g} s) = size s.\n\
                 Proof. by elim: s => //= x s IHs; rewrite IHs {l1}. Qed.\n"
            ),
            1 => format!("Lemma {name} : forall x, {g} x = x.\nProof. by []. Qed.\n"),
            2 => format!(
                "Lemma {name} : forall m n p, m <= n -> {g} m p.\n\
                 Proof.\nintros m n p.\napply: {l1}.\nexact: ({l2} m).\nQed.\n"
            ),
            _ => format!(
                "Lemma {name} : forall (M : 'M_n) (m : nat), M ^+ m = 0 -> {g} M = 1.\n\
                 Proof.\nmove => M m h.\nrewrite {l1} {l2} {l3}.\ncase : n.\nby rewrite !{l1}.\nQed.\n"
            ),
        };
        src.push_str(&lemma);
        families[f].push(name);
    }
    let corpus = Corpus::default()
        .add_lemmas("families", parse_library(&src, "families").unwrap())
        .unwrap();
    (corpus, families)
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Largest distance inside a group and smallest distance across groups.
pub fn group_separation(
    db: &proofmine::features::FeatureDatabase,
    groups: &[Vec<String>],
) -> (f64, f64) {
    let pts = db.points();
    let idx: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| g.iter().map(|n| db.position(n).unwrap()).collect())
        .collect();
    let mut within: f64 = 0.0;
    let mut between = f64::INFINITY;
    for (a, ga) in idx.iter().enumerate() {
        for (b, gb) in idx.iter().enumerate() {
            for &i in ga {
                for &j in gb {
                    let d = euclid(&pts[i], &pts[j]);
                    if a == b {
                        within = within.max(d);
                    } else {
                        between = between.min(d);
                    }
                }
            }
        }
    }
    (within, between)
}
