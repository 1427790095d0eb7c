//! Tokenizer shared by the scenario, fact and rule languages.

use std::fmt;

use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Number(u64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    Star,
    Arrow,
    Eq,
    Ne,
    Ge,
    Le,
    Gt,
    Lt,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Number(n) => write!(f, "number {n}"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Ne => f.write_str("`!=`"),
            Tok::Ge => f.write_str("`>=`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::Lt => f.write_str("`<`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Whether `s` can be written without quotes.
pub fn is_bare_word(s: &str) -> bool {
    let mut chars = s.chars().peekable();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    while let Some(c) = chars.next() {
        if c == '-' {
            match chars.peek() {
                Some(n) if n.is_alphanumeric() || *n == '_' => {}
                _ => return false,
            }
        } else if !(c.is_alphanumeric() || c == '_') {
            return false;
        }
    }
    true
}

/// Renders a string literal with the escapes the lexer understands.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
    out: Vec<Spanned>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
            out: Vec::new(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn push(&mut self, tok: Tok, line: usize, col: usize) {
        let length = if self.line == line {
            (self.col - col).max(1)
        } else {
            1
        };
        self.out.push(Spanned {
            tok,
            span: SourceSpan {
                line,
                column: col,
                length,
            },
        });
    }

    fn run(mut self) -> Result<Vec<Spanned>, ParseError> {
        while let Some(&c) = self.chars.peek() {
            let (line, col) = (self.line, self.col);
            if c.is_whitespace() || c == '\u{feff}' {
                self.bump();
                continue;
            }
            if c == '#' {
                self.skip_line();
                continue;
            }
            if c == '"' {
                let s = self.string(line, col)?;
                self.push(Tok::Str(s), line, col);
                continue;
            }
            if c.is_ascii_digit() {
                let mut digits = String::new();
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let n = digits.parse::<u64>().map_err(|_| {
                    ParseError::new(
                        "number out of range",
                        SourceSpan {
                            line,
                            column: col,
                            length: digits.chars().count(),
                        },
                    )
                })?;
                self.push(Tok::Number(n), line, col);
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let word = self.word();
                self.push(Tok::Ident(word), line, col);
                continue;
            }
            self.bump();
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '*' => Tok::Star,
                '=' => Tok::Eq,
                '≠' => Tok::Ne,
                '≥' => Tok::Ge,
                '≤' => Tok::Le,
                '-' if self.eat('>') => Tok::Arrow,
                '!' if self.eat('=') => Tok::Ne,
                '>' => {
                    if self.eat('=') {
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                '<' => {
                    if self.eat('=') {
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                '/' if self.eat('/') => {
                    self.skip_line();
                    continue;
                }
                other => {
                    return Err(ParseError::new(
                        format!("unexpected character {other:?}"),
                        SourceSpan {
                            line,
                            column: col,
                            length: 1,
                        },
                    ))
                }
            };
            self.push(tok, line, col);
        }
        Ok(self.out)
    }

    fn eat(&mut self, want: char) -> bool {
        if self.chars.peek() == Some(&want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn skip_line(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn word(&mut self) -> String {
        let mut word = String::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' {
                word.push(c);
                self.bump();
            } else if c == '-' {
                // `-` joins words (`non-physical`) but not arrows (`a->b`).
                let mut ahead = self.chars.clone();
                ahead.next();
                match ahead.peek() {
                    Some(n) if n.is_alphanumeric() || *n == '_' => {
                        word.push(c);
                        self.bump();
                    }
                    _ => break,
                }
            } else {
                break;
            }
        }
        word
    }

    fn string(&mut self, line: usize, col: usize) -> Result<String, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            let here = SourceSpan {
                line: self.line,
                column: self.col,
                length: 1,
            };
            match self.bump() {
                None | Some('\n') => {
                    return Err(ParseError::new(
                        "unterminated string",
                        SourceSpan {
                            line,
                            column: col,
                            length: 1,
                        },
                    ))
                }
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    _ => return Err(ParseError::new("invalid escape sequence", here)),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn hyphenated_words_and_arrows() {
        assert_eq!(
            kinds("non-physical a->b residents-iot_service"),
            vec![
                Tok::Ident("non-physical".into()),
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::Ident("residents-iot_service".into()),
            ]
        );
    }

    #[test]
    fn comments_and_operators() {
        assert_eq!(
            kinds("x >= 2 # trailing\n// line\n y != \"q\\\"z\" ≤"),
            vec![
                Tok::Ident("x".into()),
                Tok::Ge,
                Tok::Number(2),
                Tok::Ident("y".into()),
                Tok::Ne,
                Tok::Str("q\"z".into()),
                Tok::Le,
            ]
        );
    }

    #[test]
    fn spans_are_one_based_and_char_counted() {
        let toks = tokenize("ab\r\n  \"é\" x").unwrap();
        assert_eq!(toks[0].span, SourceSpan { line: 1, column: 1, length: 2 });
        assert_eq!(toks[1].span, SourceSpan { line: 2, column: 3, length: 3 });
        assert_eq!(toks[2].span, SourceSpan { line: 2, column: 7, length: 1 });
    }

    #[test]
    fn unterminated_string_is_located() {
        let err = tokenize("a \"open").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 1, column: 3, length: 1 });
    }

    #[test]
    fn quote_roundtrips_through_lexer() {
        let raw = "a \"b\" \\ c\nd";
        assert_eq!(kinds(&quote(raw)), vec![Tok::Str(raw.into())]);
    }

    #[test]
    fn bare_words() {
        assert!(is_bare_word("Center_City"));
        assert!(is_bare_word("Fairmount"));
        assert!(is_bare_word("non-physical"));
        assert!(!is_bare_word("Center City"));
        assert!(!is_bare_word("9th"));
        assert!(!is_bare_word("a-"));
        assert!(!is_bare_word(""));
    }
}
