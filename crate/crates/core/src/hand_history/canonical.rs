//! Line-delimited JSON hand format: one `HandRecord` object per line.

use super::{HandRecord, ParseDiagnostic, ParsedLog};
use crate::error::{Error, Result};

pub(super) fn parse(text: &str, source: &str) -> Result<ParsedLog> {
    let mut out = ParsedLog::default();
    let ends_with_newline = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match serde_json::from_str::<HandRecord>(line) {
            Ok(hand) => out.hands.push(hand),
            Err(e) if e.is_eof() && i + 1 == lines.len() && !ends_with_newline => {
                out.diagnostics.push(ParseDiagnostic {
                    source: source.to_string(),
                    line: line_no,
                    message: format!("incomplete trailing hand ({e})"),
                });
            }
            Err(e) => {
                return Err(Error::Parse {
                    line: line_no,
                    token: token_at(line, e.column()),
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

/// The lexical token ending at (1-based) `column`.
fn token_at(line: &str, column: usize) -> String {
    let chars: Vec<char> = line.chars().collect();
    if chars.is_empty() {
        return String::new();
    }
    let is_delim = |c: char| c.is_whitespace() || ",:[]{}".contains(c);
    let mut end = column.clamp(1, chars.len());
    // serde_json points just past the token; step back onto it.
    while end > 1 && is_delim(chars[end - 1]) {
        end -= 1;
    }
    let mut start = end - 1;
    if chars[start] == '"' && start > 0 {
        // closing quote of a string token: include the whole string
        start -= 1;
        while start > 0 && chars[start] != '"' {
            start -= 1;
        }
    } else {
        while start > 0 && !is_delim(chars[start - 1]) {
            start -= 1;
        }
    }
    chars[start..end].iter().collect()
}

/// Serializes one hand as a single canonical line (no trailing newline).
pub fn emit_canonical_line(hand: &HandRecord) -> Result<String> {
    Ok(serde_json::to_string(hand)?)
}

pub fn emit_canonical(hands: &[HandRecord]) -> Result<String> {
    let mut out = String::new();
    for hand in hands {
        out.push_str(&emit_canonical_line(hand)?);
        out.push('\n');
    }
    Ok(out)
}
