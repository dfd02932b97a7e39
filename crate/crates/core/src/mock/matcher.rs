use std::fmt;
use std::sync::Arc;

use crate::value::Value;

pub type ArgPredicate = Arc<dyn Fn(&Value) -> bool + Send + Sync>;
pub type TuplePredicate = Arc<dyn Fn(&[Value]) -> bool + Send + Sync>;

/// Per-argument matcher.
#[derive(Clone)]
pub enum Matcher {
    /// Matches anything (`_`).
    Any,
    Eq(Value),
    Pred(ArgPredicate),
}

impl Matcher {
    pub fn any() -> Self {
        Matcher::Any
    }

    pub fn eq(value: impl Into<Value>) -> Self {
        Matcher::Eq(value.into())
    }

    pub fn pred(f: impl Fn(&Value) -> bool + Send + Sync + 'static) -> Self {
        Matcher::Pred(Arc::new(f))
    }

    pub fn matches(&self, value: &Value) -> bool {
        match self {
            Matcher::Any => true,
            Matcher::Eq(expected) => expected == value,
            Matcher::Pred(f) => f(value),
        }
    }
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matcher::Any => f.write_str("_"),
            Matcher::Eq(v) => write!(f, "{v}"),
            Matcher::Pred(_) => f.write_str("<predicate>"),
        }
    }
}

/// Values convert to equality matchers, so `[5.into(), Matcher::Any]` reads well.
impl<T: Into<Value>> From<T> for Matcher {
    fn from(v: T) -> Self {
        Matcher::Eq(v.into())
    }
}

pub(crate) fn all_match(matchers: &[Matcher], args: &[Value]) -> bool {
    matchers.len() == args.len() && matchers.iter().zip(args).all(|(m, a)| m.matches(a))
}

pub(crate) fn render_matchers(matchers: &[Matcher]) -> String {
    matchers
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn render_args(args: &[Value]) -> String {
    args.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}
