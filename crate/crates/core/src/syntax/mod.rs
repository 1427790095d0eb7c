//! Text formats: `.city` scenarios, `.facts` override files, and the shared
//! tokenizer/diagnostics they are built on. The rule language parser lives in
//! [`crate::rules`] but reuses the pieces here.

use std::fmt;

pub mod lexer;
pub mod scenario;

pub use scenario::{parse_facts, parse_scenario, render_scenario};

/// 1-based location of a diagnostic. `length` counts characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub const START: SourceSpan = SourceSpan {
        line: 1,
        column: 1,
        length: 1,
    };
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    pub help: Option<String>,
}

impl ParseError {
    pub fn new(message: impl Into<String>, span: SourceSpan) -> Self {
        Self {
            message: message.into(),
            span,
            help: None,
        }
    }

    pub fn with_help(mut self, help: impl Into<String>) -> Self {
        self.help = Some(help.into());
        self
    }

    /// Multi-line diagnostic with the offending source line and a caret marker.
    pub fn render(&self, path: &str, src: &str) -> String {
        let mut out = format!("error: {}\n  --> {}:{}\n", self.message, path, self.span);
        if let Some(line) = src.lines().nth(self.span.line.saturating_sub(1)) {
            let line = line.trim_end_matches('\r');
            let gutter = self.span.line.to_string();
            let pad = " ".repeat(gutter.len());
            out.push_str(&format!("{pad} |\n{gutter} | {line}\n{pad} | "));
            out.push_str(&" ".repeat(self.span.column.saturating_sub(1)));
            out.push_str(&"^".repeat(self.span.length.max(1)));
            out.push('\n');
        }
        if let Some(help) = &self.help {
            out.push_str(&format!("  = help: {help}\n"));
        }
        out
    }
}

/// Closest candidate by edit distance, for "did you mean" hints.
pub(crate) fn suggest<'a>(found: &str, candidates: &[&'a str]) -> Option<&'a str> {
    let found = found.to_lowercase();
    candidates
        .iter()
        .map(|c| {
            let head = c.split('_').next().unwrap_or(c);
            let d = edit_distance(&found, c);
            let d = if head.len() >= 3 && head != *c {
                d.min(edit_distance(&found, head))
            } else {
                d
            };
            (d, *c)
        })
        .filter(|(d, c)| *d <= 2.max(c.len() / 3))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c)
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != *cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

/// Token cursor with the expectation helpers all three parsers share.
pub(crate) struct Cursor {
    toks: Vec<lexer::Spanned>,
    pos: usize,
    eof: SourceSpan,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        let toks = lexer::tokenize(src)?;
        let eof = eof_span(src);
        Ok(Self { toks, pos: 0, eof })
    }

    pub(crate) fn peek(&self) -> Option<&lexer::Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub(crate) fn peek_at(&self, ahead: usize) -> Option<&lexer::Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.tok)
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map_or(self.eof, |t| t.span)
    }

    pub(crate) fn prev_span(&self) -> SourceSpan {
        self.pos
            .checked_sub(1)
            .and_then(|p| self.toks.get(p))
            .map_or(self.eof, |t| t.span)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn next(&mut self) -> Option<lexer::Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, want: &lexer::Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(lexer::Tok::Ident(s)) if s == kw)
    }

    pub(crate) fn unexpected(&self, expected: &str) -> ParseError {
        match self.toks.get(self.pos) {
            Some(t) => ParseError::new(format!("expected {expected}, found {}", t.tok), t.span),
            None => ParseError::new(format!("expected {expected}, found end of input"), self.eof),
        }
    }

    pub(crate) fn expect(&mut self, want: &lexer::Tok) -> Result<SourceSpan, ParseError> {
        if self.peek() == Some(want) {
            let span = self.span();
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.unexpected(&want.to_string()))
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<SourceSpan, ParseError> {
        if self.is_keyword(kw) {
            let span = self.span();
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(lexer::Tok::Ident(s)) => {
                let s = s.clone();
                let span = self.span();
                self.pos += 1;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// An identifier or a quoted string.
    pub(crate) fn word(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek() {
            Some(lexer::Tok::Ident(s)) | Some(lexer::Tok::Str(s)) => {
                let s = s.clone();
                let span = self.span();
                self.pos += 1;
                Ok((s, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub(crate) fn number(&mut self, what: &str) -> Result<(u64, SourceSpan), ParseError> {
        match self.peek() {
            Some(lexer::Tok::Number(n)) => {
                let n = *n;
                let span = self.span();
                self.pos += 1;
                Ok((n, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }
}

/// Span of the last character of `src` (or 1:1 for empty input).
fn eof_span(src: &str) -> SourceSpan {
    let mut line = 1;
    let mut col = 0;
    for c in src.chars() {
        if c == '\n' {
            line += 1;
            col = 0;
        } else {
            col += 1;
        }
    }
    if col == 0 {
        // Input ends with a newline: point at the end of the last non-empty line.
        let lines: Vec<&str> = src.lines().collect();
        match lines.iter().rposition(|l| !l.is_empty()) {
            Some(idx) => SourceSpan {
                line: idx + 1,
                column: lines[idx].chars().count().max(1),
                length: 1,
            },
            None => SourceSpan::START,
        }
    } else {
        SourceSpan {
            line,
            column: col,
            length: 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eof_span_points_inside_input() {
        assert_eq!(eof_span(""), SourceSpan::START);
        assert_eq!(eof_span("ab"), SourceSpan { line: 1, column: 2, length: 1 });
        assert_eq!(eof_span("ab\ncd\n"), SourceSpan { line: 2, column: 2, length: 1 });
    }

    #[test]
    fn suggestions() {
        assert_eq!(suggest("riskk", &["risk", "movement"]), Some("risk"));
        assert_eq!(suggest("zzzzzz", &["risk", "movement"]), None);
    }

    #[test]
    fn render_draws_caret() {
        let err = ParseError::new("bad", SourceSpan { line: 2, column: 3, length: 2 });
        let text = err.render("f.city", "one\ntwo three\n");
        assert!(text.contains("f.city:2:3"));
        assert!(text.contains("2 | two three"));
        assert!(text.lines().any(|l| l.ends_with("  ^^")));
    }
}
