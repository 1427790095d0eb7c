//! Process exit statuses and their precedence.

use civitas::judge::Summary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Compliant = 0,
    Indeterminate = 3,
    Violated = 2,
    Error = 1,
}

impl Status {
    fn rank(self) -> u8 {
        match self {
            Status::Compliant => 0,
            Status::Indeterminate => 1,
            Status::Violated => 2,
            Status::Error => 3,
        }
    }

    /// The dominant of two statuses: errors, then violations, then unknowns.
    pub fn max(self, other: Status) -> Status {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_summary(s: &Summary) -> Status {
        let mut status = Status::Compliant;
        if s.indeterminate > 0 {
            status = status.max(Status::Indeterminate);
        }
        if s.violated > 0 {
            status = status.max(Status::Violated);
        }
        status
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_verdict_mix() {
        for compliant in 0..3 {
            for violated in 0..3 {
                for indeterminate in 0..3 {
                    let s = Summary { compliant, violated, indeterminate };
                    let want = if violated > 0 {
                        2
                    } else if indeterminate > 0 {
                        3
                    } else {
                        0
                    };
                    assert_eq!(Status::from_summary(&s).code(), want, "{s:?}");
                }
            }
        }
    }

    #[test]
    fn errors_dominate() {
        let all = [Status::Compliant, Status::Indeterminate, Status::Violated, Status::Error];
        for a in all {
            assert_eq!(a.max(Status::Error), Status::Error);
            assert_eq!(Status::Error.max(a), Status::Error);
            assert_eq!(a.max(Status::Compliant), a);
        }
        assert_eq!(Status::Indeterminate.max(Status::Violated), Status::Violated);
    }
}
