use std::any::Any;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use super::context::PhaseAbort;
use super::{FailureEntry, TestContext, TestDefinition, TestId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestStatus {
    Passed,
    Failed,
    Skipped,
}

/// Outcome of one executed test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord {
    pub id: TestId,
    pub status: TestStatus,
    pub failures: Vec<FailureEntry>,
    pub duration_seconds: f64,
    pub skip_reason: Option<String>,
}

impl TestRecord {
    pub fn passed(&self) -> bool {
        self.status == TestStatus::Passed
    }
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    Fixture,
    SetUp,
    Body,
    TearDown,
}

impl Phase {
    fn label(self) -> &'static str {
        match self {
            Phase::Fixture => "fixture construction",
            Phase::SetUp => "setup",
            Phase::Body => "body",
            Phase::TearDown => "teardown",
        }
    }
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_owned()
    }
}

fn uncaught(phase: Phase, detail: &str) -> FailureEntry {
    FailureEntry::fatal(format!("uncaught error: {detail}"), phase.label())
}

/// Runs `f`, converting an escaping panic or `Err` into a fatal entry.
/// Returns `None` if the phase did not complete normally.
fn guarded<T>(
    ctx: &mut TestContext,
    phase: Phase,
    f: impl FnOnce(&mut TestContext) -> Result<T, String>,
) -> Option<T> {
    match crate::quiet::quietly(|| catch_unwind(AssertUnwindSafe(|| f(ctx)))) {
        Ok(Ok(v)) => Some(v),
        Ok(Err(msg)) => {
            ctx.push_failure(uncaught(phase, &msg));
            None
        }
        Err(payload) => {
            if !payload.is::<PhaseAbort>() {
                ctx.push_failure(uncaught(phase, &panic_message(payload.as_ref())));
            }
            None
        }
    }
}

/// Executes one test: fresh fixture, setup, body (skipped if setup failed
/// fatally or skipped), teardown (always), then mock verification.
pub fn execute_test(def: &TestDefinition) -> TestRecord {
    let start = Instant::now();
    let mut ctx = TestContext::new();

    if let Some(mut instance) = guarded(&mut ctx, Phase::Fixture, |_| Ok(def.instantiate())) {
        guarded(&mut ctx, Phase::SetUp, |ctx| {
            instance.set_up(ctx);
            Ok(())
        });
        if !ctx.fatal_raised() && ctx.skip_reason().is_none() {
            guarded(&mut ctx, Phase::Body, |ctx| instance.run(ctx));
        }
        guarded(&mut ctx, Phase::TearDown, |ctx| {
            instance.tear_down(ctx);
            Ok(())
        });
    }
    ctx.verify_doubles();

    let duration_seconds = start.elapsed().as_secs_f64();
    let failures = ctx.failures().to_vec();
    let skip_reason = ctx.skip_reason().map(str::to_owned);
    let status = if !failures.is_empty() {
        TestStatus::Failed
    } else if skip_reason.is_some() {
        TestStatus::Skipped
    } else {
        TestStatus::Passed
    };
    TestRecord {
        id: def.id().clone(),
        status,
        failures,
        duration_seconds,
        skip_reason,
    }
}
