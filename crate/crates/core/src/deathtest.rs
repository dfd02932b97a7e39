//! Death tests: run a statement in a child process, classify how it ended
//! and match its standard error.
//!
//! The usual child is the test executable itself, re-invoked with
//! `--internal-death-statement=<name>`; the runner's entry point sees the
//! flag, runs the named statement registered with
//! [`TestRegistry::register_death_statement`](crate::TestRegistry::register_death_statement)
//! and exits. An explicit command can be used instead.
//!
//! Matcher regexes use search semantics. The supported subset is literals,
//! `.`, `*`, `+`, `?`, character classes and the `^`/`$` anchors.

use std::fmt;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use regex::Regex;
use thiserror::Error;

use crate::assertions::{AssertionOutcome, Severity};
use crate::xunit::{FailureEntry, TestContext, TestId, TestRegistry};

/// Flag that makes a re-invoked test executable run one death statement.
pub const INTERNAL_FLAG: &str = "--internal-death-statement";

#[derive(Debug, Error)]
pub enum DeathTestError {
    #[error("could not spawn death test child: {0}")]
    SpawnFailure(#[source] std::io::Error),
    #[error("child ended without exit code or signal")]
    UnknownStatus,
    #[error("invalid output pattern {pattern:?}: {source}")]
    InvalidPattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Exited(i32),
    Signaled(i32),
}

impl fmt::Display for ExitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExitKind::Exited(code) => write!(f, "exited with code {code}"),
            ExitKind::Signaled(sig) => write!(f, "killed by signal {sig}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeathRecord {
    pub exit: ExitKind,
    pub stderr: String,
    /// Captured but never matched.
    pub stdout: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitPredicate {
    /// Non-zero exit code or any signal.
    AnyAbnormal,
    ExitedWithCode(i32),
    KilledBySignal(i32),
}

impl ExitPredicate {
    pub fn holds(self, exit: ExitKind) -> bool {
        match (self, exit) {
            (ExitPredicate::AnyAbnormal, ExitKind::Exited(code)) => code != 0,
            (ExitPredicate::AnyAbnormal, ExitKind::Signaled(_)) => true,
            (ExitPredicate::ExitedWithCode(want), ExitKind::Exited(code)) => want == code,
            (ExitPredicate::KilledBySignal(want), ExitKind::Signaled(sig)) => want == sig,
            _ => false,
        }
    }
}

impl fmt::Display for ExitPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExitPredicate::AnyAbnormal => f.write_str("abnormal termination"),
            ExitPredicate::ExitedWithCode(c) => write!(f, "exit code {c}"),
            ExitPredicate::KilledBySignal(s) => write!(f, "signal {s}"),
        }
    }
}

#[derive(Debug, Clone)]
enum Pattern {
    Regex(Regex),
    Substring(String),
}

/// Matcher applied to the child's standard error.
#[derive(Debug, Clone)]
pub struct OutputMatcher {
    pattern: Pattern,
}

impl OutputMatcher {
    pub fn regex(pattern: &str) -> Result<Self, DeathTestError> {
        let re = Regex::new(pattern).map_err(|source| DeathTestError::InvalidPattern {
            pattern: pattern.to_owned(),
            source,
        })?;
        Ok(OutputMatcher {
            pattern: Pattern::Regex(re),
        })
    }

    pub fn substring(text: impl Into<String>) -> Self {
        OutputMatcher {
            pattern: Pattern::Substring(text.into()),
        }
    }

    /// Matches any output.
    pub fn any() -> Self {
        Self::substring("")
    }

    pub fn matches(&self, text: &str) -> bool {
        match &self.pattern {
            Pattern::Regex(re) => re.is_match(text),
            Pattern::Substring(s) => text.contains(s.as_str()),
        }
    }
}

impl fmt::Display for OutputMatcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.pattern {
            Pattern::Regex(re) => write!(f, "regex {:?}", re.as_str()),
            Pattern::Substring(s) => write!(f, "substring {s:?}"),
        }
    }
}

/// What to run in the child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChildSpec {
    /// Re-invoke the current executable on a registered statement.
    Statement(String),
    Command {
        program: PathBuf,
        args: Vec<String>,
    },
}

impl ChildSpec {
    pub fn statement(name: impl Into<String>) -> Self {
        ChildSpec::Statement(name.into())
    }

    pub fn command<I, S>(program: impl Into<PathBuf>, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ChildSpec::Command {
            program: program.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// `sh -c <script>`, handy for scripted children.
    pub fn shell(script: impl Into<String>) -> Self {
        Self::command("sh", ["-c".to_owned(), script.into()])
    }

    fn to_command(&self) -> Result<Command, DeathTestError> {
        match self {
            ChildSpec::Statement(name) => {
                let exe = std::env::current_exe().map_err(DeathTestError::SpawnFailure)?;
                let mut cmd = Command::new(exe);
                cmd.arg(format!("{INTERNAL_FLAG}={name}"));
                Ok(cmd)
            }
            ChildSpec::Command { program, args } => {
                let mut cmd = Command::new(program);
                cmd.args(args);
                Ok(cmd)
            }
        }
    }
}

#[cfg(unix)]
fn classify(status: std::process::ExitStatus) -> Result<ExitKind, DeathTestError> {
    use std::os::unix::process::ExitStatusExt;
    match (status.code(), status.signal()) {
        (Some(code), _) => Ok(ExitKind::Exited(code)),
        (None, Some(sig)) => Ok(ExitKind::Signaled(sig)),
        (None, None) => Err(DeathTestError::UnknownStatus),
    }
}

#[cfg(not(unix))]
fn classify(status: std::process::ExitStatus) -> Result<ExitKind, DeathTestError> {
    status
        .code()
        .map(ExitKind::Exited)
        .ok_or(DeathTestError::UnknownStatus)
}

/// Runs the child to completion and captures its exit and output.
pub fn run_in_child(spec: &ChildSpec) -> Result<DeathRecord, DeathTestError> {
    let output = spec
        .to_command()?
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .output()
        .map_err(DeathTestError::SpawnFailure)?;
    Ok(DeathRecord {
        exit: classify(output.status)?,
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
    })
}

pub fn eval_death(
    record: &DeathRecord,
    predicate: ExitPredicate,
    matcher: &OutputMatcher,
) -> AssertionOutcome {
    let exit_ok = predicate.holds(record.exit);
    let output_ok = matcher.matches(&record.stderr);
    if exit_ok && output_ok {
        return AssertionOutcome::success();
    }
    AssertionOutcome::failure(format!(
        "expected EXIT of {} with stderr {:?} and {predicate} with stderr matching {matcher}",
        record.exit, record.stderr
    ))
}

/// Stable partition: `*_DeathTest` suites first.
pub fn schedule_death_first(ids: &[TestId]) -> Vec<TestId> {
    let (death, rest): (Vec<&TestId>, Vec<&TestId>) =
        ids.iter().partition(|id| id.is_death_suite());
    death.into_iter().chain(rest).cloned().collect()
}

/// Child side of a re-invoked death test. Returns the exit code to use if
/// `argv` names a death statement, `None` otherwise.
pub fn run_requested_statement(registry: &TestRegistry, argv: &[String]) -> Option<i32> {
    let prefix = format!("{INTERNAL_FLAG}=");
    let name = argv.iter().skip(1).find_map(|a| a.strip_prefix(&prefix))?;
    match registry.death_statement(name) {
        Some(statement) => {
            statement();
            Some(0)
        }
        None => {
            eprintln!("unknown death statement {name:?}");
            Some(2)
        }
    }
}

impl TestContext {
    /// Checks that the child ends per `predicate` with matching stderr.
    /// A child that cannot be spawned is a fatal error, not a verdict.
    pub fn check_exit(
        &mut self,
        spec: &ChildSpec,
        predicate: ExitPredicate,
        matcher: &OutputMatcher,
        severity: Severity,
        location: &str,
    ) -> bool {
        if matches!(predicate, ExitPredicate::KilledBySignal(_)) && !cfg!(unix) {
            self.skip("signals are not available on this platform");
        }
        match run_in_child(spec) {
            Ok(record) => self.report(
                eval_death(&record, predicate, matcher).with_severity(severity),
                location,
            ),
            Err(e) => {
                self.record_failure(FailureEntry::fatal(
                    format!("death test error: {e}"),
                    location,
                ));
                false
            }
        }
    }

    pub fn expect_exit(
        &mut self,
        spec: &ChildSpec,
        predicate: ExitPredicate,
        matcher: &OutputMatcher,
        location: &str,
    ) -> bool {
        self.check_exit(spec, predicate, matcher, Severity::NonFatal, location)
    }

    pub fn assert_exit(
        &mut self,
        spec: &ChildSpec,
        predicate: ExitPredicate,
        matcher: &OutputMatcher,
        location: &str,
    ) {
        self.check_exit(spec, predicate, matcher, Severity::Fatal, location);
    }

    pub fn expect_death(
        &mut self,
        spec: &ChildSpec,
        matcher: &OutputMatcher,
        location: &str,
    ) -> bool {
        self.check_exit(
            spec,
            ExitPredicate::AnyAbnormal,
            matcher,
            Severity::NonFatal,
            location,
        )
    }

    pub fn assert_death(&mut self, spec: &ChildSpec, matcher: &OutputMatcher, location: &str) {
        self.check_exit(
            spec,
            ExitPredicate::AnyAbnormal,
            matcher,
            Severity::Fatal,
            location,
        );
    }
}
