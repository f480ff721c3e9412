use std::collections::HashMap;

use super::{ArgKind, ArgumentToken, LemmaRecord, ProofStep, Sentence, TacticApplication};
use crate::error::{ParseError, ParseErrorKind};

/// Tactics the reader understands; anything else is kept as an opaque
/// application with best-effort argument lexing.
pub const KNOWN_TACTICS: &[&str] = &[
    "move",
    "case",
    "elim",
    "apply",
    "rewrite",
    "exists",
    "exact",
    "intro",
    "intros",
    "split",
    "by",
    "unfold",
    "induction",
    "destruct",
    "simpl",
    "trivial",
    "tauto",
    "contradiction",
    "auto",
];

const INDUCTION_TACTICS: &[&str] = &["elim", "induction"];
const INTRO_TACTICS: &[&str] = &["intro", "intros"];
const WILDCARDS: &[&str] = &["_", "//", "//=", "/=", "/", "?", "*", "**"];

/// Whether a token appears as an ordinary argument or inside an
/// introduction pattern (right of `=>`, after `as`, or under `intro(s)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgPosition {
    Argument,
    IntroPattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Binder,
    Intro,
    Induction,
}

/// Local names known at some point of a proof.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    names: HashMap<String, Origin>,
    pending_induction: bool,
    /// A bare `intro`/`intros` ran, so Coq's generated names `H`, `H0`, ...
    /// may be in scope.
    anonymous_intros: bool,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_generated_name(s: &str) -> bool {
    s.strip_prefix('H')
        .is_some_and(|rest| rest.bytes().all(|b| b.is_ascii_digit()))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    !s.ends_with('.') && chars.all(|c| is_ident_char(c) || c == '.')
}

/// Names introduced by an intro-pattern token such as `[a| n IH a /=]`.
fn intro_names(token: &str) -> Vec<String> {
    token
        .split(|c: char| !is_ident_char(c))
        .filter(|w| w.starts_with(is_ident_start) && *w != "_")
        .map(str::to_string)
        .collect()
}

/// Removes SSReflect rewrite flags and selectors, returning
/// `(modifier, core)`.
fn strip_modifiers(raw: &str) -> (Option<String>, &str) {
    let mut rest = raw;
    loop {
        let bytes = rest.as_bytes();
        if bytes.is_empty() {
            break;
        }
        let cut = match bytes[0] {
            b'-' if bytes.get(1) != Some(&b'>') => 1,
            b'!' | b'?' | b'@' => 1,
            b'0'..=b'9' => {
                let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
                match bytes.get(digits) {
                    Some(b'!') | Some(b'?') => digits + 1,
                    _ => 0,
                }
            }
            b'{' | b'[' => {
                let close = if bytes[0] == b'{' { b'}' } else { b']' };
                let mut depth = 0;
                let mut end = None;
                for (i, &b) in bytes.iter().enumerate() {
                    if b == bytes[0] {
                        depth += 1;
                    } else if b == close {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(i + 1);
                            break;
                        }
                    }
                }
                match end {
                    Some(e) if e < bytes.len() => e,
                    _ => 0,
                }
            }
            b'/' if rest[1..].starts_with(is_ident_start) => 1,
            _ => 0,
        };
        if cut == 0 {
            break;
        }
        rest = &rest[cut..];
    }
    let prefix_len = raw.len() - rest.len();
    let modifier = (prefix_len > 0).then(|| raw[..prefix_len].to_string());
    (modifier, rest)
}

impl Scope {
    pub fn with_binders<S: AsRef<str>>(binders: &[S]) -> Self {
        Self {
            names: binders
                .iter()
                .map(|b| (b.as_ref().to_string(), Origin::Binder))
                .collect(),
            pending_induction: false,
            anonymous_intros: false,
        }
    }

    /// Classify one lexed argument token against the names in scope.
    pub fn classify(&self, raw: &str, position: ArgPosition) -> ArgumentToken {
        let token = |text: &str, kind, modifier| ArgumentToken {
            text: text.to_string(),
            kind,
            modifier,
        };
        if WILDCARDS.contains(&raw) {
            return token(raw, ArgKind::Wildcard, None);
        }
        if position == ArgPosition::IntroPattern {
            return token(raw, ArgKind::IntroPattern, None);
        }
        let (modifier, core) = strip_modifiers(raw);
        let kind = if core.is_empty() || WILDCARDS.contains(&core) {
            ArgKind::Wildcard
        } else if core.bytes().all(|b| b.is_ascii_digit()) {
            ArgKind::NumericConstant
        } else if is_identifier(core) {
            match self.names.get(core) {
                Some(Origin::Induction) => ArgKind::InductiveHypothesis,
                Some(_) => ArgKind::Hypothesis,
                None if self.anonymous_intros && is_generated_name(core) => ArgKind::Hypothesis,
                None => ArgKind::ExternalLemma,
            }
        } else {
            ArgKind::TermExpr
        };
        let text = if core.is_empty() { raw } else { core };
        token(text, kind, modifier)
    }

    /// Record the names a tactic introduces.
    ///
    /// Names introduced by the pattern of an `elim`/`induction`, or by the
    /// first introducing tactic right after one, are inductive hypotheses.
    pub fn apply(&mut self, tactic: &TacticApplication) {
        if tactic.name == "by" {
            return;
        }
        let introduced: Vec<String> = tactic
            .arguments
            .iter()
            .filter(|a| a.kind == ArgKind::IntroPattern)
            .flat_map(|a| intro_names(&a.text))
            .collect();
        if INTRO_TACTICS.contains(&tactic.name.as_str()) && tactic.arguments.is_empty() {
            self.anonymous_intros = true;
        }
        let is_induction = INDUCTION_TACTICS.contains(&tactic.name.as_str());
        let introduces = tactic
            .arguments
            .iter()
            .any(|a| a.kind == ArgKind::IntroPattern);
        if introduces {
            let origin = if is_induction || self.pending_induction {
                Origin::Induction
            } else {
                Origin::Intro
            };
            for n in introduced {
                self.names.insert(n, origin);
            }
            self.pending_induction = false;
        } else {
            self.pending_induction = is_induction;
        }
    }
}

/// Classify `token` as it would be classified in step `step_index`
/// (1-based) of `lemma`, given everything introduced by earlier steps.
pub fn classify_argument(
    token: &str,
    position: ArgPosition,
    lemma: &LemmaRecord,
    step_index: usize,
) -> ArgumentToken {
    let mut scope = Scope::with_binders(&lemma.binders);
    for step in lemma.steps.iter().take(step_index.saturating_sub(1)) {
        for t in &step.tactics {
            scope.apply(t);
        }
    }
    scope.classify(token, position)
}

/// Split `text` on `sep` outside of brackets.
fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// Whitespace/comma separated tokens at bracket depth 0, with `=>` and a
/// standalone `:` emitted as their own tokens.
fn split_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut i = 0;
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if depth == 0 {
            if c.is_whitespace() || c == ',' {
                flush(&mut cur, &mut out);
                i += 1;
                continue;
            }
            if c == '=' && chars.get(i + 1) == Some(&'>') {
                flush(&mut cur, &mut out);
                out.push("=>".into());
                i += 2;
                continue;
            }
            if c == ':'
                && chars.get(i + 1) != Some(&':')
                && chars.get(i + 1) != Some(&'=')
                && (i == 0 || chars[i - 1] != ':')
            {
                flush(&mut cur, &mut out);
                out.push(":".into());
                i += 1;
                continue;
            }
        }
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        cur.push(c);
        i += 1;
    }
    flush(&mut cur, &mut out);
    out
}

fn strip_bullets(s: &str) -> &str {
    s.trim_start_matches(|c: char| c.is_whitespace() || "-+*{}".contains(c))
        .trim_end_matches(|c: char| c.is_whitespace() || c == '}')
}

type LexedTactic = (String, Vec<(String, ArgPosition)>);

/// Lex one `;`-separated segment into one tactic, or two when it starts
/// with the `by` closing tactical.
fn lex_segment(segment: &str) -> Vec<LexedTactic> {
    let seg = strip_bullets(segment);
    if seg.is_empty() {
        return Vec::new();
    }
    if let Some(rest) = seg.strip_prefix("by") {
        if rest.is_empty() || rest.starts_with(|c: char| c.is_whitespace() || c == '[' || c == '(')
        {
            let mut out = vec![("by".to_string(), Vec::new())];
            let inner = rest.trim();
            if !(inner.is_empty() || inner == "[]" || WILDCARDS.contains(&inner)) {
                out.extend(lex_segment(inner));
            }
            return out;
        }
    }
    let name_len = seg
        .char_indices()
        .find(|&(i, c)| {
            if i == 0 {
                !is_ident_start(c)
            } else {
                !is_ident_char(c)
            }
        })
        .map_or(seg.len(), |(i, _)| i);
    let (name, rest) = if name_len == 0 {
        ("_".to_string(), seg)
    } else {
        (seg[..name_len].to_string(), &seg[name_len..])
    };
    let mut intro = INTRO_TACTICS.contains(&name.as_str());
    let mut args = Vec::new();
    for tok in split_tokens(rest) {
        match tok.as_str() {
            "=>" | "as" => intro = true,
            ":" => {}
            "in" | "with" | "at" | "using" => intro = false,
            "->" | "<-" if !intro => {}
            _ => {
                let pos = if intro {
                    ArgPosition::IntroPattern
                } else {
                    ArgPosition::Argument
                };
                args.push((tok, pos));
            }
        }
    }
    vec![(name, args)]
}

pub(crate) fn build_step(
    index: usize,
    text: &str,
    scope: &mut Scope,
) -> Result<ProofStep, ParseErrorKind> {
    let mut tactics = Vec::new();
    for segment in split_top_level(text, ';') {
        for (name, toks) in lex_segment(segment) {
            let arguments = toks
                .iter()
                .map(|(t, pos)| scope.classify(t, *pos))
                .collect();
            let tactic = TacticApplication { name, arguments };
            scope.apply(&tactic);
            tactics.push(tactic);
        }
    }
    if tactics.is_empty() {
        return Err(ParseErrorKind::EmptyStep);
    }
    Ok(ProofStep {
        index,
        text: text.trim().to_string(),
        tactics,
        goal_before: None,
        subgoals_after: None,
    })
}

pub(crate) fn steps_from_sentences<S: AsRef<str>>(
    sentences: &[Sentence],
    binders: &[S],
) -> Result<Vec<ProofStep>, ParseError> {
    let mut scope = Scope::with_binders(binders);
    sentences
        .iter()
        .enumerate()
        .map(|(k, s)| {
            build_step(k + 1, &s.text, &mut scope).map_err(|e| ParseError::new(s.line, e))
        })
        .collect()
}

/// Split a proof body (without `Proof.`/`Qed.`) into steps.
pub fn split_steps(proof_body: &str) -> Result<Vec<ProofStep>, ParseError> {
    let sentences = super::split_sentences(proof_body)?;
    steps_from_sentences::<&str>(&sentences, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(step: &ProofStep) -> Vec<ArgKind> {
        step.arguments().map(|a| a.kind).collect()
    }

    #[test]
    fn intro_only_step() {
        let steps = split_steps("move => M m nilpotent.").unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].tactic_names(), vec!["move"]);
        let args: Vec<_> = steps[0].arguments().map(|a| a.text.as_str()).collect();
        assert_eq!(args, vec!["M", "m", "nilpotent"]);
        assert!(kinds(&steps[0]).iter().all(|k| *k == ArgKind::IntroPattern));
    }

    #[test]
    fn by_rewrite_counts_two_tactics() {
        let steps = split_steps("by rewrite big_distrr mulmxBr mul1mx.").unwrap();
        assert_eq!(steps[0].tactic_names(), vec!["by", "rewrite"]);
        assert_eq!(steps[0].tactics[1].arguments.len(), 3);
        assert_eq!(kinds(&steps[0]), vec![ArgKind::ExternalLemma; 3]);
    }

    #[test]
    fn semicolon_composition() {
        let text = "rewrite A; elim: s => //= x.";
        let steps = split_steps(text).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].tactics.len(), 2);
        // oracle: count top-level `;` by hand-written scan
        let body = text.trim_end_matches('.');
        let mut depth = 0;
        let mut semis = 0;
        for c in body.chars() {
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth -= 1,
                ';' if depth == 0 => semis += 1,
                _ => {}
            }
        }
        assert_eq!(steps[0].tactics.len(), semis + 1);
    }

    #[test]
    fn nested_semicolons_are_not_split() {
        let steps = split_steps("exists [:: a; b]; done.").unwrap();
        assert_eq!(steps[0].tactic_names(), vec!["exists", "done"]);
    }

    #[test]
    fn empty_step_is_an_error() {
        let err = split_steps("rewrite foo. . done.").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmptyStep);
    }

    #[test]
    fn inductive_hypothesis_after_elim() {
        let body = "move=> m1 m2 n; elim: m1 => //= m1 IHm; rewrite -addnA -IHm.";
        let steps = split_steps(body).unwrap();
        let rw = &steps[0].tactics[2];
        assert_eq!(rw.name, "rewrite");
        assert_eq!(rw.arguments[0].text, "addnA");
        assert_eq!(rw.arguments[0].kind, ArgKind::ExternalLemma);
        assert_eq!(rw.arguments[0].modifier.as_deref(), Some("-"));
        assert_eq!(rw.arguments[1].text, "IHm");
        assert_eq!(rw.arguments[1].kind, ArgKind::InductiveHypothesis);
    }

    #[test]
    fn elim_pattern_tokens_are_intro_patterns() {
        let steps = split_steps("elim: m1 => //= m1 IHm.").unwrap();
        assert_eq!(
            kinds(&steps[0]),
            vec![
                ArgKind::ExternalLemma,
                ArgKind::Wildcard,
                ArgKind::IntroPattern,
                ArgKind::IntroPattern
            ]
        );
    }

    #[test]
    fn wildcards_and_numbers() {
        let s = Scope::default();
        for w in ["_", "//", "//=", "/="] {
            assert_eq!(s.classify(w, ArgPosition::Argument).kind, ArgKind::Wildcard);
            assert_eq!(
                s.classify(w, ArgPosition::IntroPattern).kind,
                ArgKind::Wildcard
            );
        }
        assert_eq!(
            s.classify("42", ArgPosition::Argument).kind,
            ArgKind::NumericConstant
        );
        assert_eq!(
            s.classify("(addnC n)", ArgPosition::Argument).kind,
            ArgKind::TermExpr
        );
    }

    #[test]
    fn rewrite_flags_are_stripped() {
        let s = Scope::default();
        let cases = [
            ("-!addnA", "addnA", Some("-!")),
            ("!thinmx0", "thinmx0", Some("!")),
            ("/rot", "rot", Some("/")),
            ("[a * _]mulnC", "mulnC", Some("[a * _]")),
            ("{2}addnC", "addnC", Some("{2}")),
            ("2!addnC", "addnC", Some("2!")),
            ("addnC", "addnC", None),
        ];
        for (raw, text, modifier) in cases {
            let a = s.classify(raw, ArgPosition::Argument);
            assert_eq!(a.text, text, "{raw}");
            assert_eq!(a.kind, ArgKind::ExternalLemma, "{raw}");
            assert_eq!(a.modifier.as_deref(), modifier, "{raw}");
        }
    }

    #[test]
    fn qualified_names_are_identifiers() {
        let s = Scope::default();
        assert_eq!(
            s.classify("Finite.axiom", ArgPosition::Argument).kind,
            ArgKind::ExternalLemma
        );
    }

    #[test]
    fn tactic_tokens_glued_to_name() {
        let steps = split_steps("case=> // m n p. apply/invmx_uniq. exact: (altP idP).").unwrap();
        assert_eq!(steps[0].tactic_names(), vec!["case"]);
        assert_eq!(
            kinds(&steps[0]),
            vec![
                ArgKind::Wildcard,
                ArgKind::IntroPattern,
                ArgKind::IntroPattern,
                ArgKind::IntroPattern
            ]
        );
        assert_eq!(steps[1].tactics[0].arguments[0].text, "invmx_uniq");
        assert_eq!(kinds(&steps[2]), vec![ArgKind::TermExpr]);
    }

    #[test]
    fn intros_arguments_are_patterns_and_introduce() {
        let steps = split_steps("intros [_ [_ done]]. exact done.").unwrap();
        assert_eq!(kinds(&steps[0]), vec![ArgKind::IntroPattern]);
        assert_eq!(kinds(&steps[1]), vec![ArgKind::Hypothesis]);
    }

    #[test]
    fn induction_then_intro() {
        let steps = split_steps("elim: n. move=> n IH. rewrite IH. move=> x. rewrite x.").unwrap();
        assert_eq!(kinds(&steps[2]), vec![ArgKind::InductiveHypothesis]);
        assert_eq!(kinds(&steps[4]), vec![ArgKind::Hypothesis]);
    }

    #[test]
    fn bullets_are_ignored() {
        let steps = split_steps("- by case. + done.").unwrap();
        assert_eq!(steps[0].tactic_names(), vec!["by", "case"]);
        assert_eq!(steps[1].tactic_names(), vec!["done"]);
    }

    #[test]
    fn by_empty_brackets() {
        let steps = split_steps("by [].").unwrap();
        assert_eq!(steps[0].tactic_names(), vec!["by"]);
        assert!(steps[0].tactics[0].arguments.is_empty());
    }

    #[test]
    fn unknown_tactics_are_opaque() {
        let steps = split_steps("deskolem_apply BI_fctExists.").unwrap();
        let t = &steps[0].tactics[0];
        assert_eq!(t.name, "deskolem_apply");
        assert!(!t.is_known());
        assert_eq!(t.arguments[0].kind, ArgKind::ExternalLemma);
    }

    #[test]
    fn generated_names_after_bare_intros() {
        let steps = split_steps("rewrite H. intros. destruct s; simpl in H0; apply Hx.").unwrap();
        assert_eq!(kinds(&steps[0]), vec![ArgKind::ExternalLemma]);
        assert_eq!(
            kinds(&steps[2]),
            vec![
                ArgKind::ExternalLemma,
                ArgKind::Hypothesis,
                ArgKind::ExternalLemma
            ]
        );
    }

    #[test]
    fn coq_in_clause() {
        let steps = split_steps("intros H. simpl in H.").unwrap();
        assert_eq!(kinds(&steps[1]), vec![ArgKind::Hypothesis]);
    }
}
