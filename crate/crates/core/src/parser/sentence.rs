use serde::{Deserialize, Serialize};

use crate::error::{ParseError, ParseErrorKind};

/// A vernacular sentence with its terminating `.` removed and comments
/// replaced by a single space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    /// Line of the first non-blank character (1-based).
    pub line: usize,
    /// Line of the terminating `.`, or of the last character.
    pub end_line: usize,
    pub terminated: bool,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Split source text into sentences.
///
/// A `.` ends a sentence when followed by whitespace or end of input.
/// Comments `(* ... *)` nest and are dropped, string literals are copied
/// verbatim, and a `.` between identifier characters (`Finite.axiom`) is
/// part of the name. `Proof.` also terminates when glued to the next tactic.
/// Trailing text without a final `.` becomes an unterminated sentence.
pub fn split_sentences(source: &str) -> Result<Vec<Sentence>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut line = 1usize;
    let mut start_line: Option<usize> = None;
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            let open_line = line;
            let mut depth = 1;
            i += 2;
            while depth > 0 {
                match (chars.get(i), chars.get(i + 1)) {
                    (None, _) => {
                        return Err(ParseError::new(
                            open_line,
                            ParseErrorKind::UnbalancedDelimiters,
                        ))
                    }
                    (Some('('), Some('*')) => {
                        depth += 1;
                        i += 2;
                    }
                    (Some('*'), Some(')')) => {
                        depth -= 1;
                        i += 2;
                    }
                    (Some(&ch), _) => {
                        if ch == '\n' {
                            line += 1;
                        }
                        i += 1;
                    }
                }
            }
            buf.push(' ');
            continue;
        }
        if c == '"' {
            let open_line = line;
            start_line.get_or_insert(line);
            buf.push('"');
            i += 1;
            loop {
                match chars.get(i) {
                    None => {
                        return Err(ParseError::new(
                            open_line,
                            ParseErrorKind::UnbalancedDelimiters,
                        ))
                    }
                    Some('"') if chars.get(i + 1) == Some(&'"') => {
                        buf.push_str("\"\"");
                        i += 2;
                    }
                    Some('"') => {
                        buf.push('"');
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        if ch == '\n' {
                            line += 1;
                        }
                        buf.push(ch);
                        i += 1;
                    }
                }
            }
            continue;
        }
        if c == '.' {
            let next = chars.get(i + 1).copied();
            let prev = buf.chars().last();
            let qualified = prev.is_some_and(is_ident_char) && next.is_some_and(is_ident_char);
            let ends = match next {
                None => true,
                Some(n) => n.is_whitespace(),
            };
            let glued_proof = buf.trim() == "Proof" && next.is_some_and(|n| !n.is_whitespace());
            if (ends && !qualified) || glued_proof {
                out.push(Sentence {
                    text: std::mem::take(&mut buf).trim().to_string(),
                    line: start_line.take().unwrap_or(line),
                    end_line: line,
                    terminated: true,
                });
                i += 1;
                continue;
            }
        }
        if c == '\n' {
            line += 1;
        }
        if !c.is_whitespace() {
            start_line.get_or_insert(line);
        }
        buf.push(c);
        i += 1;
    }

    let rest = buf.trim();
    if !rest.is_empty() {
        out.push(Sentence {
            text: rest.to_string(),
            line: start_line.unwrap_or(line),
            end_line: line,
            terminated: false,
        });
    }
    Ok(out)
}
