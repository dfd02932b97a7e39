use std::cell::RefCell;
use std::fmt;
use std::panic;
use std::rc::Rc;

use crate::assertions::AssertionOutcome;
use crate::mock::{DefaultValues, MethodDescriptor, MockDouble, MockError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Fatal,
    NonFatal,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Fatal => f.write_str("fatal"),
            Severity::NonFatal => f.write_str("nonfatal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureEntry {
    pub severity: Severity,
    pub message: String,
    /// `file:line` or a caller-supplied label.
    pub location: String,
}

impl FailureEntry {
    pub fn new(
        severity: Severity,
        message: impl Into<String>,
        location: impl Into<String>,
    ) -> Self {
        let mut message = message.into();
        if message.is_empty() {
            message = "failure".into();
        }
        FailureEntry {
            severity,
            message,
            location: location.into(),
        }
    }

    pub fn fatal(message: impl Into<String>, location: impl Into<String>) -> Self {
        Self::new(Severity::Fatal, message, location)
    }

    pub fn nonfatal(message: impl Into<String>, location: impl Into<String>) -> Self {
        Self::new(Severity::NonFatal, message, location)
    }
}

/// Unwind payload used to leave the current phase early. Carried by
/// `resume_unwind`, so the panic hook never sees it.
pub(crate) struct PhaseAbort;

/// Per-test mutable state: failures recorded so far, skip annotation and the
/// mock doubles created for this test.
pub struct TestContext {
    failures: Vec<FailureEntry>,
    fatal_raised: bool,
    skip_reason: Option<String>,
    defaults: Rc<RefCell<DefaultValues>>,
    doubles: Vec<Rc<MockDouble>>,
}

impl Default for TestContext {
    fn default() -> Self {
        Self::new()
    }
}

impl TestContext {
    pub fn new() -> Self {
        TestContext {
            failures: Vec::new(),
            fatal_raised: false,
            skip_reason: None,
            defaults: Rc::new(RefCell::new(DefaultValues::default())),
            doubles: Vec::new(),
        }
    }

    pub fn failures(&self) -> &[FailureEntry] {
        &self.failures
    }

    pub fn fatal_raised(&self) -> bool {
        self.fatal_raised
    }

    pub fn skip_reason(&self) -> Option<&str> {
        self.skip_reason.as_deref()
    }

    /// Appends a failure. A fatal entry ends the current phase immediately:
    /// control unwinds to the executor, which still runs teardown.
    pub fn record_failure(&mut self, entry: FailureEntry) {
        let fatal = entry.severity == Severity::Fatal;
        self.push_failure(entry);
        if fatal {
            panic::resume_unwind(Box::new(PhaseAbort));
        }
    }

    /// Appends without triggering the early exit. Used by the executor for
    /// errors caught at phase boundaries.
    pub(crate) fn push_failure(&mut self, entry: FailureEntry) {
        if entry.severity == Severity::Fatal {
            self.fatal_raised = true;
        }
        self.failures.push(entry);
    }

    /// Marks the test skipped and leaves the current phase. Does not
    /// return normally.
    pub fn skip(&mut self, reason: impl Into<String>) {
        self.skip_reason = Some(reason.into());
        panic::resume_unwind(Box::new(PhaseAbort));
    }

    /// Records a failed outcome at its own severity; returns whether it passed.
    pub fn report(&mut self, outcome: AssertionOutcome, location: &str) -> bool {
        if outcome.passed {
            return true;
        }
        self.record_failure(FailureEntry::new(
            outcome.severity,
            outcome.message,
            location,
        ));
        false
    }

    /// Non-fatal check: records the failure and lets the test continue.
    pub fn expect(&mut self, outcome: AssertionOutcome, location: &str) -> bool {
        self.report(outcome.with_severity(Severity::NonFatal), location)
    }

    /// Fatal check: on failure the rest of the current phase is skipped.
    pub fn assert(&mut self, outcome: AssertionOutcome, location: &str) {
        self.report(outcome.with_severity(Severity::Fatal), location);
    }

    /// Creates a double whose failures and unmet expectations are reported
    /// against this test once teardown has run.
    pub fn make_double(
        &mut self,
        methods: Vec<MethodDescriptor>,
    ) -> Result<Rc<MockDouble>, MockError> {
        let double = Rc::new(MockDouble::with_defaults(
            methods,
            Rc::clone(&self.defaults),
        )?);
        self.doubles.push(Rc::clone(&double));
        Ok(double)
    }

    /// Kind-default table shared by every double made through this context.
    pub fn defaults(&self) -> Rc<RefCell<DefaultValues>> {
        Rc::clone(&self.defaults)
    }

    /// Drains dispatch failures and verification violations of every double
    /// into the failure list and prints uninteresting-call warnings.
    pub(crate) fn verify_doubles(&mut self) {
        let doubles = std::mem::take(&mut self.doubles);
        for double in &doubles {
            for warning in double.warnings() {
                eprintln!("warning: {warning}");
            }
            for failure in double.take_failures() {
                self.push_failure(FailureEntry::nonfatal(failure.to_string(), "mock"));
            }
            for violation in double.verify() {
                self.push_failure(FailureEntry::nonfatal(violation.to_string(), "mock verify"));
            }
        }
    }
}

/// Non-fatal assertion: `expect_that!(ctx, eq(a, b))`.
#[macro_export]
macro_rules! expect_that {
    ($ctx:expr, $outcome:expr) => {
        $ctx.expect($outcome, concat!(file!(), ":", line!()))
    };
}

/// Fatal assertion: `assert_that!(ctx, eq(a, b))`; on failure the rest of
/// the current phase does not run.
#[macro_export]
macro_rules! assert_that {
    ($ctx:expr, $outcome:expr) => {
        $ctx.assert($outcome, concat!(file!(), ":", line!()))
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::panic::{catch_unwind, AssertUnwindSafe};

    #[test]
    fn nonfatal_entry_does_not_raise() {
        let mut ctx = TestContext::new();
        ctx.record_failure(FailureEntry::nonfatal("x", "here"));
        assert_eq!(ctx.failures().len(), 1);
        assert!(!ctx.fatal_raised());
    }

    #[test]
    fn fatal_entry_unwinds_with_marker() {
        let mut ctx = TestContext::new();
        let mut reached = false;
        let err = catch_unwind(AssertUnwindSafe(|| {
            ctx.record_failure(FailureEntry::fatal("stop", "here"));
            reached = true;
        }))
        .unwrap_err();
        assert!(err.is::<PhaseAbort>());
        assert!(!reached);
        assert!(ctx.fatal_raised());
        assert_eq!(ctx.failures().len(), 1);
    }

    #[test]
    fn empty_message_is_replaced() {
        assert_eq!(FailureEntry::fatal("", "l").message, "failure");
    }
}
