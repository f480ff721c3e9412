//! Reader for a subset of Coq/SSReflect vernacular and for the
//! "proofmine trace v1" JSON Lines format.
//!
//! The subset covers lemma-like declarations (`Lemma`, `Theorem`,
//! `Corollary`, `Fact`) with their `Proof. ... Qed.` bodies. Every other
//! vernacular sentence is skipped. Tactics outside the known whitelist are
//! kept as opaque [`TacticApplication`]s with best-effort argument lexing.

mod sentence;
mod tactic;
mod term;
mod trace;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{ParseError, ParseErrorKind};

pub use sentence::{split_sentences, Sentence};
pub use tactic::{classify_argument, split_steps, ArgPosition, Scope, KNOWN_TACTICS};
pub use term::{parse_term_tree, TermTree};
pub use trace::{parse_trace, TraceRecord, TRACE_FORMAT};

/// Argument categories recognised in tactic command lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArgKind {
    Hypothesis,
    ExternalLemma,
    InductiveHypothesis,
    NumericConstant,
    TermExpr,
    Wildcard,
    IntroPattern,
}

impl ArgKind {
    pub const ALL: [ArgKind; 7] = [
        ArgKind::Hypothesis,
        ArgKind::ExternalLemma,
        ArgKind::InductiveHypothesis,
        ArgKind::NumericConstant,
        ArgKind::TermExpr,
        ArgKind::Wildcard,
        ArgKind::IntroPattern,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentToken {
    /// Token text with rewrite flags and selectors removed.
    pub text: String,
    pub kind: ArgKind,
    /// Stripped SSReflect prefix such as `-`, `!`, `-!`, `{2}`, `/` or `[a * _]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modifier: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TacticApplication {
    pub name: String,
    pub arguments: Vec<ArgumentToken>,
}

impl TacticApplication {
    pub fn is_known(&self) -> bool {
        KNOWN_TACTICS.contains(&self.name.as_str())
    }
}

/// One `.`-terminated command line of a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofStep {
    /// 1-based position inside the proof.
    pub index: usize,
    /// Source text of the command line, without the terminating `.`.
    pub text: String,
    pub tactics: Vec<TacticApplication>,
    pub goal_before: Option<TermTree>,
    pub subgoals_after: Option<u32>,
}

impl ProofStep {
    pub fn tactic_names(&self) -> Vec<&str> {
        self.tactics.iter().map(|t| t.name.as_str()).collect()
    }

    pub fn arguments(&self) -> impl Iterator<Item = &ArgumentToken> {
        self.tactics.iter().flat_map(|t| t.arguments.iter())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub start_line: usize,
    pub end_line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub name: String,
    pub statement: TermTree,
    /// Names bound by the lemma header (`Lemma foo a s : ...`) and by the
    /// leading `forall` of its statement.
    #[serde(default)]
    pub binders: Vec<String>,
    pub steps: Vec<ProofStep>,
    pub library: String,
    pub source_span: SourceSpan,
}

const LEMMA_KEYWORDS: &[&str] = &["Lemma", "Theorem", "Corollary", "Fact"];
const PROOF_END: &[&str] = &["Qed", "Defined"];
const VERNACULAR: &[&str] = &[
    "Lemma",
    "Theorem",
    "Corollary",
    "Fact",
    "Remark",
    "Proposition",
    "Definition",
    "Fixpoint",
    "CoFixpoint",
    "Inductive",
    "CoInductive",
    "Record",
    "Structure",
    "Class",
    "Instance",
    "Require",
    "Import",
    "Export",
    "From",
    "Section",
    "End",
    "Module",
    "Variable",
    "Variables",
    "Hypothesis",
    "Hypotheses",
    "Context",
    "Let",
    "Notation",
    "Infix",
    "Open",
    "Close",
    "Set",
    "Unset",
    "Implicit",
    "Arguments",
    "Local",
    "Global",
    "Canonical",
    "Coercion",
    "Axiom",
    "Parameter",
    "Check",
    "Print",
    "Eval",
    "Compute",
    "Search",
    "SearchAbout",
    "Ltac",
    "Tactic",
    "Hint",
    "Declare",
    "Delimit",
    "Bind",
    "Reserved",
    "Admitted",
    "Abort",
    "Example",
];

fn first_word(text: &str) -> &str {
    let t = text.trim_start();
    let end = t
        .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\''))
        .unwrap_or(t.len());
    &t[..end]
}

/// Parsing strictness: lenient mode accepts a final proof without `Qed.`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strict,
    Lenient,
}

/// Parse a `.v` source into lemma records tagged with `library_tag`.
pub fn parse_library(source: &str, library_tag: &str) -> Result<Vec<LemmaRecord>, ParseError> {
    parse_source(source, library_tag, Mode::Strict)
}

/// Parse an unfinished proof script and return its last lemma.
///
/// A missing `Qed.` is accepted; the lemma must carry at least one step.
pub fn parse_partial(source: &str, library_tag: &str) -> Result<LemmaRecord, ParseError> {
    let mut lemmas = parse_source(source, library_tag, Mode::Lenient)?;
    let lemma = lemmas
        .pop()
        .ok_or_else(|| ParseError::new(1, ParseErrorKind::MalformedStatement))?;
    if lemma.steps.is_empty() {
        return Err(ParseError::new(
            lemma.source_span.start_line,
            ParseErrorKind::NoProofBody(lemma.name),
        ));
    }
    Ok(lemma)
}

struct Header {
    name: String,
    binders: Vec<String>,
    statement: TermTree,
}

struct OpenLemma {
    header: Header,
    start_line: usize,
    proof_seen: bool,
    body: Vec<Sentence>,
}

fn parse_source(source: &str, tag: &str, mode: Mode) -> Result<Vec<LemmaRecord>, ParseError> {
    let sentences = split_sentences(source)?;
    let mut out: Vec<LemmaRecord> = Vec::new();
    let mut seen = HashSet::new();
    let mut open: Option<OpenLemma> = None;

    let mut i = 0;
    while i < sentences.len() {
        let s = &sentences[i];
        let word = first_word(&s.text);
        match open.take() {
            None => {
                if LEMMA_KEYWORDS.contains(&word) {
                    let header = parse_header(&s.text[s.text.find(word).unwrap() + word.len()..])
                        .map_err(|kind| ParseError::new(s.line, kind))?;
                    open = Some(OpenLemma {
                        header,
                        start_line: s.line,
                        proof_seen: false,
                        body: Vec::new(),
                    });
                }
                i += 1;
            }
            Some(mut lemma) => {
                if word == "Proof" && !lemma.proof_seen && lemma.body.is_empty() {
                    lemma.proof_seen = true;
                    open = Some(lemma);
                    i += 1;
                } else if PROOF_END.contains(&word) && s.text.trim() == word {
                    let rec = finish(lemma, tag, s.end_line, &mut seen)?;
                    out.push(rec);
                    i += 1;
                } else if VERNACULAR.contains(&word) {
                    if lemma.body.is_empty() && !lemma.proof_seen {
                        // statement-only declaration; the sentence is re-read outside
                        continue;
                    }
                    if word == "Admitted" || word == "Abort" {
                        i += 1;
                        continue;
                    }
                    return Err(ParseError::new(
                        s.line,
                        ParseErrorKind::UnterminatedProof(lemma.header.name),
                    ));
                } else {
                    lemma.body.push(s.clone());
                    open = Some(lemma);
                    i += 1;
                }
            }
        }
    }

    if let Some(lemma) = open.filter(|l| l.proof_seen || !l.body.is_empty()) {
        match mode {
            Mode::Strict => {
                return Err(ParseError::new(
                    lemma.start_line,
                    ParseErrorKind::UnterminatedProof(lemma.header.name),
                ))
            }
            Mode::Lenient => {
                let end = lemma.body.last().map_or(lemma.start_line, |s| s.end_line);
                let rec = finish(lemma, tag, end, &mut seen)?;
                out.push(rec);
            }
        }
    }
    Ok(out)
}

fn finish(
    lemma: OpenLemma,
    tag: &str,
    end_line: usize,
    seen: &mut HashSet<String>,
) -> Result<LemmaRecord, ParseError> {
    let OpenLemma {
        header,
        start_line,
        body,
        ..
    } = lemma;
    if !seen.insert(header.name.clone()) {
        return Err(ParseError::new(
            start_line,
            ParseErrorKind::DuplicateLemmaName(header.name),
        ));
    }
    let mut steps = tactic::steps_from_sentences(&body, &header.binders)?;
    if let Some(first) = steps.first_mut() {
        first.goal_before = Some(header.statement.clone());
    }
    Ok(LemmaRecord {
        name: header.name,
        statement: header.statement,
        binders: header.binders,
        steps,
        library: tag.to_string(),
        source_span: SourceSpan {
            file: String::new(),
            start_line,
            end_line,
        },
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `name binders : statement` (the text after the keyword).
fn parse_header(text: &str) -> Result<Header, ParseErrorKind> {
    let t = text.trim_start();
    let name_len = t
        .char_indices()
        .find(|&(i, c)| {
            if i == 0 {
                !is_ident_start(c)
            } else {
                !(is_ident_char(c) || c == '.')
            }
        })
        .map_or(t.len(), |(i, _)| i);
    if name_len == 0 {
        return Err(ParseErrorKind::MalformedStatement);
    }
    let name = t[..name_len].to_string();
    let rest = &t[name_len..];

    // first `:` at depth 0 that is not part of `::` or `:=`
    let chars: Vec<(usize, char)> = rest.char_indices().collect();
    let mut depth = 0i32;
    let mut colon = None;
    for (k, &(pos, c)) in chars.iter().enumerate() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ':' if depth == 0 => {
                let next = chars.get(k + 1).map(|p| p.1);
                let prev = if k > 0 { Some(chars[k - 1].1) } else { None };
                if next != Some(':') && next != Some('=') && prev != Some(':') {
                    colon = Some(pos);
                    break;
                }
            }
            _ => {}
        }
    }
    let colon = colon.ok_or(ParseErrorKind::MalformedStatement)?;
    let mut binders = header_binders(&rest[..colon]);
    let statement = parse_term_tree(&rest[colon + 1..])?;
    for b in statement.leading_binders() {
        if !binders.contains(&b) {
            binders.push(b);
        }
    }
    Ok(Header {
        name,
        binders,
        statement,
    })
}

fn header_binders(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut before_colon = true;
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut Vec<String>, ok: bool| {
        if ok && !word.is_empty() && word.starts_with(is_ident_start) {
            out.push(std::mem::take(word));
        }
        word.clear();
    };
    for c in text.chars() {
        match c {
            '(' | '{' | '[' => {
                flush(&mut word, &mut out, before_colon);
                depth += 1;
                before_colon = true;
            }
            ')' | '}' | ']' => {
                flush(&mut word, &mut out, before_colon);
                depth -= 1;
                before_colon = true;
            }
            ':' => {
                flush(&mut word, &mut out, before_colon);
                if depth > 0 {
                    before_colon = false;
                }
            }
            c if is_ident_char(c) => word.push(c),
            _ => flush(&mut word, &mut out, before_colon),
        }
    }
    flush(&mut word, &mut out, before_colon);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn andbb_has_one_step_with_case() {
        let src = "Lemma andbb : idempotent andb.\nProof. by case. Qed.\n";
        let lemmas = parse_library(src, "ssrbool").unwrap();
        assert_eq!(lemmas.len(), 1);
        let l = &lemmas[0];
        assert_eq!(l.name, "andbb");
        assert_eq!(l.steps.len(), 1);
        assert_eq!(l.steps[0].tactic_names(), vec!["by", "case"]);
        assert_eq!(l.library, "ssrbool");
        assert_eq!(l.statement.symbol, "idempotent");
    }

    #[test]
    fn empty_source_is_empty() {
        assert!(parse_library("", "x").unwrap().is_empty());
        assert!(parse_library("  (* nothing *)\n", "x").unwrap().is_empty());
    }

    #[test]
    fn proof_keyword_glued_to_tactic() {
        let src = "Lemma addnCA : left_commutative addn.\n\
                   Proof.by move=> m n p; elim: m => //= m; rewrite addnS => <-.\nQed.";
        let l = &parse_library(src, "ssrnat").unwrap()[0];
        assert_eq!(l.steps.len(), 1);
        assert_eq!(
            l.steps[0].tactic_names(),
            vec!["by", "move", "elim", "rewrite"]
        );
    }

    #[test]
    fn header_binders_are_collected() {
        let src = "Lemma has_map a s : has a (map s) = has (preim f a) s.\nProof. by elim: s => //= x s ->. Qed.";
        let l = &parse_library(src, "seq").unwrap()[0];
        assert_eq!(l.binders, vec!["a", "s"]);
        let elim = &l.steps[0].tactics[1];
        assert_eq!(elim.arguments[0].kind, ArgKind::Hypothesis);
    }

    #[test]
    fn typed_header_binders() {
        assert_eq!(
            header_binders(" (n : nat) m (M N : 'M_n) "),
            vec!["n", "m", "M", "N"]
        );
    }

    #[test]
    fn unterminated_proof_is_an_error() {
        let err = parse_library("Lemma foo : x.\nProof.\nby case.\n", "t").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnterminatedProof(ref n) if n == "foo"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn missing_name_is_malformed() {
        let err = parse_library("Lemma : x.\nProof. done. Qed.", "t").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MalformedStatement);
    }

    #[test]
    fn duplicate_names_rejected() {
        let src = "Lemma a : x. Proof. done. Qed.\nLemma a : y. Proof. done. Qed.";
        let err = parse_library(src, "t").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateLemmaName("a".into()));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn statement_only_declarations_are_skipped() {
        let src = "Lemma altP : alt_spec b.\n\
                   Lemma boolP : alt_spec b1 b1 b1. Proof. exact: (altP idP). Qed.";
        let lemmas = parse_library(src, "ssrbool").unwrap();
        assert_eq!(lemmas.len(), 1);
        assert_eq!(lemmas[0].name, "boolP");
        let trailing = "Lemma andbb : idempotent andb.\nLemma orbb : idempotent orb.\n";
        assert!(parse_library(trailing, "ssrbool").unwrap().is_empty());
    }

    #[test]
    fn other_vernacular_is_ignored() {
        let src = "Require Import ssreflect.\nDefinition fn_fact (n : nat) := helper_fact n 1.\n\
                   Fixpoint helper_fact (n a) :=\nmatch n with\n| 0 => a\n| S p => helper_fact p (n * a)\nend.\n\
                   Theorem t : True. Proof. trivial. Qed.";
        let lemmas = parse_library(src, "jvm").unwrap();
        assert_eq!(lemmas.len(), 1);
        assert_eq!(lemmas[0].name, "t");
        assert_eq!(lemmas[0].source_span.start_line, 8);
    }

    #[test]
    fn partial_proof_without_qed() {
        let src = "Lemma fn_fact_is_theta n : fn_fact n = n`!.\nProof.\nrewrite /fn_fact.\n";
        let l = parse_partial(src, "q").unwrap();
        assert_eq!(l.steps.len(), 1);
        assert_eq!(l.steps[0].tactics[0].arguments[0].text, "fn_fact");
        assert!(parse_library(src, "q").is_err());
    }

    #[test]
    fn partial_proof_needs_a_step() {
        let err = parse_partial("Lemma x : y.\nProof.\n", "q").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::NoProofBody(_)));
    }

    #[test]
    fn static_goal_only_on_first_step() {
        let src = "Lemma x n : n = n. Proof. move=> m. by []. Qed.";
        let l = &parse_library(src, "t").unwrap()[0];
        assert!(l.steps[0].goal_before.is_some());
        assert!(l.steps[1].goal_before.is_none());
        assert!(l.steps.iter().all(|s| s.subgoals_after.is_none()));
    }
}
