use serde::{Deserialize, Serialize};

use super::tactic::{build_step, Scope};
use super::{parse_term_tree, LemmaRecord, SourceSpan, TermTree};
use crate::error::{ParseError, ParseErrorKind};

pub const TRACE_FORMAT: &str = "proofmine trace v1";

/// One line of a trace file: a proof step as observed in a live session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub lemma: String,
    pub library: String,
    pub step_index: usize,
    pub tactic_line: String,
    pub goal_before: String,
    pub subgoals_after: u32,
}

fn parse_goal(text: &str, line: usize) -> Result<Option<TermTree>, ParseError> {
    if text.trim().is_empty() {
        return Ok(None);
    }
    parse_term_tree(text)
        .map(Some)
        .map_err(|k| ParseError::new(line, k))
}

/// Read a trace file into lemma records.
///
/// Lemmas keep their order of first appearance; steps are ordered by
/// `step_index`, which must run 1..=k without gaps. The statement is the
/// goal before step 1. Every record is tagged with `library_tag`.
pub fn parse_trace(source: &str, library_tag: &str) -> Result<Vec<LemmaRecord>, ParseError> {
    let mut groups: Vec<(String, Vec<(usize, TraceRecord)>)> = Vec::new();
    for (k, raw) in source.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord = serde_json::from_str(raw)
            .map_err(|e| ParseError::new(line, ParseErrorKind::InvalidTrace(e.to_string())))?;
        match groups.iter_mut().find(|(name, _)| *name == rec.lemma) {
            Some((_, recs)) => recs.push((line, rec)),
            None => groups.push((rec.lemma.clone(), vec![(line, rec)])),
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for (name, mut recs) in groups {
        recs.sort_by_key(|(_, r)| r.step_index);
        for (pos, (line, r)) in recs.iter().enumerate() {
            if r.step_index != pos + 1 {
                return Err(ParseError::new(
                    *line,
                    ParseErrorKind::InvalidTrace(format!(
                        "lemma `{name}`: expected step {} but found {}",
                        pos + 1,
                        r.step_index
                    )),
                ));
            }
        }
        let (first_line, first) = &recs[0];
        let statement = parse_goal(&first.goal_before, *first_line)?
            .ok_or_else(|| ParseError::new(*first_line, ParseErrorKind::EmptyStatement))?;
        let binders = statement.leading_binders();
        let mut scope = Scope::with_binders(&binders);
        let mut steps = Vec::with_capacity(recs.len());
        for (line, r) in &recs {
            let text = r.tactic_line.trim().trim_end_matches('.');
            let mut step = build_step(r.step_index, text, &mut scope)
                .map_err(|k| ParseError::new(*line, k))?;
            step.goal_before = parse_goal(&r.goal_before, *line)?;
            step.subgoals_after = Some(r.subgoals_after);
            steps.push(step);
        }
        out.push(LemmaRecord {
            name,
            statement,
            binders,
            steps,
            library: library_tag.to_string(),
            source_span: SourceSpan {
                file: String::new(),
                start_line: recs[0].0,
                end_line: recs.iter().map(|(l, _)| *l).max().unwrap_or(recs[0].0),
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(lemma: &str, idx: usize, tac: &str, goal: &str, sub: u32) -> String {
        serde_json::to_string(&TraceRecord {
            lemma: lemma.into(),
            library: "x".into(),
            step_index: idx,
            tactic_line: tac.into(),
            goal_before: goal.into(),
            subgoals_after: sub,
        })
        .unwrap()
    }

    #[test]
    fn groups_and_orders_steps() {
        let src = [
            line("a", 2, "by rewrite addn0.", "n + 0 = n", 0),
            line("a", 1, "elim: n => // n IH.", "forall n, n + 0 = n", 1),
            line("b", 1, "by [].", "mult = muln", 0),
        ]
        .join("\n");
        let lemmas = parse_trace(&src, "ssrnat").unwrap();
        assert_eq!(lemmas.len(), 2);
        assert_eq!(lemmas[0].name, "a");
        assert_eq!(lemmas[0].statement.symbol, "forall");
        assert_eq!(lemmas[0].steps[0].tactic_names(), vec!["elim"]);
        assert_eq!(lemmas[0].steps[0].subgoals_after, Some(1));
        assert_eq!(lemmas[0].steps[1].goal_before.as_ref().unwrap().symbol, "=");
        assert_eq!(lemmas[1].library, "ssrnat");
    }

    #[test]
    fn gaps_are_rejected() {
        let src = [line("a", 1, "done.", "x", 0), line("a", 3, "done.", "x", 0)].join("\n");
        let err = parse_trace(&src, "t").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::InvalidTrace(_)));
    }

    #[test]
    fn bad_json_reports_line() {
        let err = parse_trace("\n{not json", "t").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
