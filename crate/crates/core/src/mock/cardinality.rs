use std::fmt;

/// How many calls an expectation wants: a lower bound that must be reached
/// and an optional upper bound that must not be exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cardinality {
    Exactly(u32),
    AtLeast(u32),
    AtMost(u32),
    /// Inclusive on both ends.
    Between(u32, u32),
    Any,
}

impl Cardinality {
    pub fn lower(self) -> u32 {
        match self {
            Cardinality::Exactly(n) | Cardinality::AtLeast(n) => n,
            Cardinality::Between(lo, _) => lo,
            Cardinality::AtMost(_) | Cardinality::Any => 0,
        }
    }

    /// `None` means unbounded.
    pub fn upper(self) -> Option<u32> {
        match self {
            Cardinality::Exactly(n) | Cardinality::AtMost(n) => Some(n),
            Cardinality::Between(_, hi) => Some(hi),
            Cardinality::AtLeast(_) | Cardinality::Any => None,
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            Cardinality::Between(lo, hi) => lo <= hi,
            _ => true,
        }
    }

    pub fn is_satisfied_by(self, calls: u32) -> bool {
        calls >= self.lower()
    }

    /// No further call is allowed.
    pub fn is_saturated_by(self, calls: u32) -> bool {
        self.upper().is_some_and(|u| calls >= u)
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Exactly(n) => write!(f, "exactly {n}"),
            Cardinality::AtLeast(n) => write!(f, "at least {n}"),
            Cardinality::AtMost(n) => write!(f, "at most {n}"),
            Cardinality::Between(lo, hi) => write!(f, "between {lo} and {hi}"),
            Cardinality::Any => f.write_str("any number"),
        }
    }
}
