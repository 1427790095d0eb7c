//! Interned-style text tokens used for entity and neighborhood names.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use unicode_normalization::UnicodeNormalization;

/// A trimmed, NFC-normalized name. The original spelling is kept for display,
/// while equality, hashing and ordering use a case-folded key.
#[derive(Clone)]
pub struct Token {
    text: String,
    key: String,
}

/// Neighborhood names are plain tokens.
pub type NeighborhoodId = Token;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("name must not be empty")]
pub struct EmptyToken;

impl Token {
    pub fn new(raw: &str) -> Result<Self, EmptyToken> {
        let text: String = raw.trim().nfc().collect();
        if text.is_empty() {
            return Err(EmptyToken);
        }
        let key = text.to_lowercase();
        Ok(Self { text, key })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// The case-folded comparison key.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Token {}

impl Hash for Token {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Token {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.text)
    }
}

impl serde::Serialize for Token {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

/// Convenience for literals known to be non-empty. Panics on blank input.
pub fn tok(s: &str) -> Token {
    Token::new(s).expect("non-empty token literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_folds_case() {
        let a = tok("  Center City ");
        let b = tok("center CITY");
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "Center City");
    }

    #[test]
    fn normalizes_composed_forms() {
        // "é" precomposed vs. e + combining acute
        assert_eq!(tok("Caf\u{e9}"), tok("Cafe\u{301}"));
    }

    #[test]
    fn rejects_blank() {
        assert_eq!(Token::new("   "), Err(EmptyToken));
    }
}
