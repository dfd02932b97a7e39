//! Assertion engine.
//!
//! Every check is a pure function returning an [`AssertionOutcome`]. The
//! severity only decides what happens when the outcome is reported through
//! a [`TestContext`](crate::TestContext): a non-fatal failure is recorded
//! and the test continues, a fatal one also ends the current phase.
//!
//! Failure messages follow `expected <relation> of <lhs> and <rhs>`.

mod ulp;

use std::fmt;
use std::panic::{self, catch_unwind, AssertUnwindSafe};

use thiserror::Error;

use crate::value::Value;
use crate::xunit::context::PhaseAbort;
pub use crate::xunit::Severity;
pub use ulp::{almost_equal, double_eq, float_eq, ulp_distance, UlpDistance, UlpFloat, UlpPolicy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionOutcome {
    pub passed: bool,
    /// Empty iff `passed`.
    pub message: String,
    pub severity: Severity,
}

impl AssertionOutcome {
    pub fn success() -> Self {
        AssertionOutcome {
            passed: true,
            message: String::new(),
            severity: Severity::NonFatal,
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        AssertionOutcome {
            passed: false,
            message: message.into(),
            severity: Severity::NonFatal,
        }
    }

    fn from_check(passed: bool, message: impl FnOnce() -> String) -> Self {
        if passed {
            Self::success()
        } else {
            Self::failure(message())
        }
    }

    pub fn with_severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    pub fn fatal(self) -> Self {
        self.with_severity(Severity::Fatal)
    }

    pub fn nonfatal(self) -> Self {
        self.with_severity(Severity::NonFatal)
    }
}

/// Argument errors turn into failed outcomes when reported.
impl From<Result<AssertionOutcome, AssertionError>> for AssertionOutcome {
    fn from(r: Result<AssertionOutcome, AssertionError>) -> Self {
        r.unwrap_or_else(|e| AssertionOutcome::failure(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssertionError {
    #[error("cannot compare {lhs} with {rhs}: operand kinds differ")]
    IncomparableOperands { lhs: String, rhs: String },
    #[error("invalid tolerance {0:?}: must be a non-negative number")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Eq,
        Relation::Ne,
        Relation::Lt,
        Relation::Le,
        Relation::Gt,
        Relation::Ge,
    ];

    pub fn holds<T: PartialOrd + ?Sized>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Ne => lhs != rhs,
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "EQ",
            Relation::Ne => "NE",
            Relation::Lt => "LT",
            Relation::Le => "LE",
            Relation::Gt => "GT",
            Relation::Ge => "GE",
        })
    }
}

pub fn compare_binary<T: PartialOrd + fmt::Debug + ?Sized>(
    relation: Relation,
    lhs: &T,
    rhs: &T,
) -> AssertionOutcome {
    AssertionOutcome::from_check(relation.holds(lhs, rhs), || {
        format!("expected {relation} of {lhs:?} and {rhs:?}")
    })
}

/// Dynamic comparison; operands must share an ordered kind.
pub fn compare_values(
    relation: Relation,
    lhs: &Value,
    rhs: &Value,
) -> Result<AssertionOutcome, AssertionError> {
    let incomparable = || AssertionError::IncomparableOperands {
        lhs: lhs.kind().to_string(),
        rhs: rhs.kind().to_string(),
    };
    if lhs.kind() != rhs.kind() {
        return Err(incomparable());
    }
    let passed = match (lhs, rhs) {
        // NaN: every relation but NE fails.
        (Value::Float(a), Value::Float(b)) => relation.holds(a, b),
        _ => {
            let ord = lhs.try_cmp(rhs).ok_or_else(incomparable)?;
            match relation {
                Relation::Eq => ord.is_eq(),
                Relation::Ne => ord.is_ne(),
                Relation::Lt => ord.is_lt(),
                Relation::Le => ord.is_le(),
                Relation::Gt => ord.is_gt(),
                Relation::Ge => ord.is_ge(),
            }
        }
    };
    Ok(AssertionOutcome::from_check(passed, || {
        format!("expected {relation} of {lhs} and {rhs}")
    }))
}

fn equality<T: PartialEq + fmt::Debug>(relation: Relation, lhs: &T, rhs: &T) -> AssertionOutcome {
    let passed = (lhs == rhs) == (relation == Relation::Eq);
    AssertionOutcome::from_check(passed, || {
        format!("expected {relation} of {lhs:?} and {rhs:?}")
    })
}

/// Only needs `PartialEq`, unlike the ordering forms.
pub fn eq<T: PartialEq + fmt::Debug>(lhs: T, rhs: T) -> AssertionOutcome {
    equality(Relation::Eq, &lhs, &rhs)
}

pub fn ne<T: PartialEq + fmt::Debug>(lhs: T, rhs: T) -> AssertionOutcome {
    equality(Relation::Ne, &lhs, &rhs)
}

pub fn lt<T: PartialOrd + fmt::Debug>(lhs: T, rhs: T) -> AssertionOutcome {
    compare_binary(Relation::Lt, &lhs, &rhs)
}

pub fn le<T: PartialOrd + fmt::Debug>(lhs: T, rhs: T) -> AssertionOutcome {
    compare_binary(Relation::Le, &lhs, &rhs)
}

pub fn gt<T: PartialOrd + fmt::Debug>(lhs: T, rhs: T) -> AssertionOutcome {
    compare_binary(Relation::Gt, &lhs, &rhs)
}

pub fn ge<T: PartialOrd + fmt::Debug>(lhs: T, rhs: T) -> AssertionOutcome {
    compare_binary(Relation::Ge, &lhs, &rhs)
}

pub fn check_boolean(condition: bool, expect_true: bool) -> AssertionOutcome {
    AssertionOutcome::from_check(condition == expect_true, || {
        let relation = if expect_true { "TRUE" } else { "FALSE" };
        format!("expected {relation} of {condition} and {expect_true}")
    })
}

pub fn is_true(condition: bool) -> AssertionOutcome {
    check_boolean(condition, true)
}

pub fn is_false(condition: bool) -> AssertionOutcome {
    check_boolean(condition, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextMode {
    StrEq,
    StrNe,
    /// ASCII case folding only; other bytes compare verbatim.
    CaseEq,
    CaseNe,
}

impl fmt::Display for TextMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TextMode::StrEq => "STREQ",
            TextMode::StrNe => "STRNE",
            TextMode::CaseEq => "STRCASEEQ",
            TextMode::CaseNe => "STRCASENE",
        })
    }
}

pub fn compare_text(mode: TextMode, s1: &str, s2: &str) -> AssertionOutcome {
    let passed = match mode {
        TextMode::StrEq => s1.as_bytes() == s2.as_bytes(),
        TextMode::StrNe => s1.as_bytes() != s2.as_bytes(),
        TextMode::CaseEq => s1.eq_ignore_ascii_case(s2),
        TextMode::CaseNe => !s1.eq_ignore_ascii_case(s2),
    };
    AssertionOutcome::from_check(passed, || format!("expected {mode} of {s1:?} and {s2:?}"))
}

pub fn streq(s1: &str, s2: &str) -> AssertionOutcome {
    compare_text(TextMode::StrEq, s1, s2)
}

pub fn strne(s1: &str, s2: &str) -> AssertionOutcome {
    compare_text(TextMode::StrNe, s1, s2)
}

pub fn strcaseeq(s1: &str, s2: &str) -> AssertionOutcome {
    compare_text(TextMode::CaseEq, s1, s2)
}

pub fn strcasene(s1: &str, s2: &str) -> AssertionOutcome {
    compare_text(TextMode::CaseNe, s1, s2)
}

/// `|a - b| <= err`, boundary inclusive.
pub fn near(a: f64, b: f64, err: f64) -> Result<AssertionOutcome, AssertionError> {
    if err.is_nan() || err < 0.0 {
        return Err(AssertionError::InvalidTolerance(err));
    }
    let diff = (a - b).abs();
    Ok(AssertionOutcome::from_check(diff <= err, || {
        format!("expected NEAR of {a:?} and {b:?} (difference {diff:?}, allowed {err:?})")
    }))
}

/// Errors carrying a kind name, matched exactly by [`expect_error`].
pub trait ErrorKind {
    fn kind(&self) -> String;
}

/// A raised error: the kind used for matching plus a free-form message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {message}")]
pub struct Raised {
    pub kind: String,
    pub message: String,
}

impl Raised {
    pub fn new(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Raised {
            kind: kind.into(),
            message: message.into(),
        }
    }
}

impl ErrorKind for Raised {
    fn kind(&self) -> String {
        self.kind.clone()
    }
}

impl ErrorKind for std::io::Error {
    fn kind(&self) -> String {
        format!("{:?}", std::io::Error::kind(self))
    }
}

/// Kind reported for a panic escaping an [`expect_error`] thunk.
pub const PANIC_KIND: &str = "panic";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ErrorMode {
    /// Exactly this kind (no subtype matching).
    Specific(String),
    Any,
    None,
}

impl ErrorMode {
    pub fn specific(kind: impl Into<String>) -> Self {
        ErrorMode::Specific(kind.into())
    }
}

fn describe_expected(mode: &ErrorMode) -> String {
    match mode {
        ErrorMode::Specific(k) => format!("error of kind {k}"),
        ErrorMode::Any => "an error".into(),
        ErrorMode::None => "no error".into(),
    }
}

/// Runs `thunk` exactly once and checks whether it raised. Neither an `Err`
/// nor a panic escapes; the framework's own early-exit signal is passed on.
pub fn expect_error<T, E, F>(thunk: F, mode: ErrorMode) -> AssertionOutcome
where
    E: ErrorKind,
    F: FnOnce() -> Result<T, E>,
{
    let raised: Option<String> =
        match crate::quiet::quietly(|| catch_unwind(AssertUnwindSafe(thunk))) {
            Ok(Ok(_)) => None,
            Ok(Err(e)) => Some(e.kind()),
            Err(payload) => {
                if payload.is::<PhaseAbort>() {
                    panic::resume_unwind(payload);
                }
                Some(PANIC_KIND.to_owned())
            }
        };
    let passed = match (&mode, &raised) {
        (ErrorMode::Specific(want), Some(got)) => want == got,
        (ErrorMode::Any, Some(_)) => true,
        (ErrorMode::None, None) => true,
        _ => false,
    };
    let relation = match mode {
        ErrorMode::Specific(_) => "THROW",
        ErrorMode::Any => "ANY_THROW",
        ErrorMode::None => "NO_THROW",
    };
    AssertionOutcome::from_check(passed, || {
        let actual = match &raised {
            Some(kind) => format!("error of kind {kind}"),
            None => "no error".into(),
        };
        format!(
            "expected {relation} of {actual} and {}",
            describe_expected(&mode)
        )
    })
}

/// Error-mode check for thunks that only signal errors by panicking.
pub fn expect_panic<F: FnOnce()>(thunk: F, mode: ErrorMode) -> AssertionOutcome {
    expect_error(
        || {
            thunk();
            Ok::<(), Raised>(())
        },
        mode,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eq_of_equal_ints() {
        assert!(eq(3, 3).passed);
        assert!(eq(3, 3).message.is_empty());
    }

    #[test]
    fn strict_lt_on_equal_values() {
        let out = lt(2, 2);
        assert!(!out.passed);
        assert_eq!(out.message, "expected LT of 2 and 2");
    }

    #[test]
    fn value_kinds_must_match() {
        assert_eq!(
            compare_values(Relation::Eq, &Value::Int(1), &Value::Text("1".into())),
            Err(AssertionError::IncomparableOperands {
                lhs: "int".into(),
                rhs: "text".into()
            })
        );
        assert!(
            compare_values(Relation::Le, &Value::Int(1), &Value::Int(2))
                .unwrap()
                .passed
        );
        let out = compare_values(
            Relation::Gt,
            &Value::Text("a".into()),
            &Value::Text("b".into()),
        )
        .unwrap();
        assert_eq!(out.message, "expected GT of \"a\" and \"b\"");
    }

    #[test]
    fn nan_relations() {
        let nan = f64::NAN;
        for rel in Relation::ALL {
            assert_eq!(
                compare_binary(rel, &nan, &1.0).passed,
                rel == Relation::Ne,
                "{rel}"
            );
            let out = compare_values(rel, &Value::Float(nan), &Value::Float(nan)).unwrap();
            assert_eq!(out.passed, rel == Relation::Ne, "{rel}");
        }
    }

    #[test]
    fn boolean_table() {
        for condition in [false, true] {
            for expect_true in [false, true] {
                assert_eq!(
                    check_boolean(condition, expect_true).passed,
                    condition == expect_true
                );
            }
        }
        assert_eq!(is_true(false).message, "expected TRUE of false and true");
    }

    #[test]
    fn text_modes() {
        assert!(strcaseeq("abc", "ABC").passed);
        assert!(!streq("abc", "ABC").passed);
        assert_eq!(
            streq("abc", "ABC").message,
            "expected STREQ of \"abc\" and \"ABC\""
        );
        // Non-ASCII bytes are not folded.
        assert!(!strcaseeq("é", "É").passed);
    }

    #[test]
    fn near_bounds() {
        assert!(near(1.0, 1.05, 0.1).unwrap().passed);
        assert!(!near(1.0, 1.2, 0.1).unwrap().passed);
        assert!(near(1.0, 2.0, 1.0).unwrap().passed);
        assert_eq!(
            near(1.0, 1.0, -0.5),
            Err(AssertionError::InvalidTolerance(-0.5))
        );
        assert!(near(1.0, 1.0, f64::NAN).is_err());
        assert!(!AssertionOutcome::from(near(1.0, 1.0, -1.0)).passed);
    }

    fn raise(kind: &'static str) -> impl FnOnce() -> Result<i32, Raised> {
        move || Err(Raised::new(kind, "x"))
    }

    #[test]
    fn error_modes() {
        assert!(expect_error(raise("K"), ErrorMode::specific("K")).passed);
        assert!(expect_error(|| Ok::<_, Raised>(1), ErrorMode::None).passed);
        let out = expect_error(raise("K"), ErrorMode::specific("L"));
        assert!(!out.passed);
        assert!(
            out.message.contains("K") && out.message.contains("L"),
            "{}",
            out.message
        );
    }

    #[test]
    fn panics_are_absorbed() {
        assert!(expect_panic(|| panic!("boom"), ErrorMode::Any).passed);
        assert!(expect_panic(|| panic!("boom"), ErrorMode::specific(PANIC_KIND)).passed);
        assert!(!expect_panic(|| {}, ErrorMode::Any).passed);
    }

    #[test]
    fn io_error_kind() {
        let out = expect_error(
            || std::fs::read("/definitely/not/here"),
            ErrorMode::specific("NotFound"),
        );
        assert!(out.passed, "{}", out.message);
    }

    proptest! {
        #[test]
        fn strne_negates_streq(a in "[ -~]{0,6}", b in "[ -~]{0,6}") {
            prop_assert_eq!(strne(&a, &b).passed, !streq(&a, &b).passed);
            prop_assert_eq!(strcasene(&a, &b).passed, !strcaseeq(&a, &b).passed);
        }

        #[test]
        fn caseeq_invariant_under_flips(s in "[ -~]{0,12}", mask in proptest::collection::vec(any::<bool>(), 12)) {
            let flipped: String = s.chars().zip(mask.iter().cycle()).map(|(c, &f)| {
                if f && c.is_ascii_alphabetic() { (c as u8 ^ 0x20) as char } else { c }
            }).collect();
            prop_assert!(strcaseeq(&s, &flipped).passed);
        }

        #[test]
        fn severities_share_verdicts(a in -3i32..3, b in -3i32..3) {
            for rel in Relation::ALL {
                let o = compare_binary(rel, &a, &b);
                prop_assert_eq!(o.clone().fatal().passed, o.nonfatal().passed);
            }
        }

        #[test]
        fn errors_never_escape(kind in 0u8..3) {
            let thunk = move || -> Result<(), Raised> {
                match kind {
                    0 => Ok(()),
                    1 => Err(Raised::new("K", "k")),
                    _ => panic!("p"),
                }
            };
            let out = expect_error(thunk, ErrorMode::Any);
            prop_assert_eq!(out.passed, kind != 0);
        }
    }
}
