//! Strong Kleene three-valued logic.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue {
    False,
    Unknown,
    True,
}

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [TruthValue::False, TruthValue::Unknown, TruthValue::True];

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            TruthValue::True => Some(true),
            TruthValue::False => Some(false),
            TruthValue::Unknown => None,
        }
    }

    pub fn is_known(self) -> bool {
        self != TruthValue::Unknown
    }

    /// Minimum under the order False < Unknown < True.
    pub fn and(self, other: Self) -> Self {
        self.min(other)
    }

    /// Maximum under the order False < Unknown < True.
    pub fn or(self, other: Self) -> Self {
        self.max(other)
    }

    pub fn implies(self, other: Self) -> Self {
        (!self).or(other)
    }
}

impl std::ops::Not for TruthValue {
    type Output = Self;

    fn not(self) -> Self {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Unknown => TruthValue::Unknown,
        }
    }
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        Self::from_bool(b)
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Unknown => "unknown",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::TruthValue::{self, False as F, True as T, Unknown as U};

    // Rows: left operand F, U, T; columns: right operand F, U, T.
    const AND: [[TruthValue; 3]; 3] = [[F, F, F], [F, U, U], [F, U, T]];
    const OR: [[TruthValue; 3]; 3] = [[F, U, T], [U, U, T], [T, T, T]];
    const IMPLIES: [[TruthValue; 3]; 3] = [[T, T, T], [U, U, T], [F, U, T]];

    #[test]
    fn connective_tables() {
        for (i, a) in TruthValue::ALL.iter().enumerate() {
            for (j, b) in TruthValue::ALL.iter().enumerate() {
                assert_eq!(a.and(*b), AND[i][j], "{a} and {b}");
                assert_eq!(a.or(*b), OR[i][j], "{a} or {b}");
                assert_eq!(a.implies(*b), IMPLIES[i][j], "{a} implies {b}");
            }
        }
        assert_eq!(!T, F);
        assert_eq!(!F, T);
        assert_eq!(!U, U);
    }
}
