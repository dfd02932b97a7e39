use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::xunit::{TestRecord, TestStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub records: Vec<TestRecord>,
}

impl SuiteReport {
    pub fn tests(&self) -> usize {
        self.records.len()
    }

    pub fn failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == TestStatus::Failed)
            .count()
    }

    pub fn time(&self) -> f64 {
        self.records.iter().map(|r| r.duration_seconds).sum()
    }
}

/// Records grouped by suite, suites in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    suites: Vec<SuiteReport>,
    pub started_at: DateTime<Utc>,
    pub total_duration_seconds: f64,
}

impl RunReport {
    pub fn new(started_at: DateTime<Utc>) -> Self {
        RunReport {
            suites: Vec::new(),
            started_at,
            total_duration_seconds: 0.0,
        }
    }

    pub fn from_records(
        records: impl IntoIterator<Item = TestRecord>,
        started_at: DateTime<Utc>,
    ) -> Self {
        let mut report = Self::new(started_at);
        for r in records {
            report.push(r);
        }
        report
    }

    /// Files the record under its own suite.
    pub fn push(&mut self, record: TestRecord) {
        match self.suites.iter_mut().find(|s| s.name == record.id.suite()) {
            Some(suite) => suite.records.push(record),
            None => self.suites.push(SuiteReport {
                name: record.id.suite().to_owned(),
                records: vec![record],
            }),
        }
    }

    pub fn suites(&self) -> &[SuiteReport] {
        &self.suites
    }

    pub fn records(&self) -> impl Iterator<Item = &TestRecord> {
        self.suites.iter().flat_map(|s| s.records.iter())
    }

    pub fn tests(&self) -> usize {
        self.suites.iter().map(SuiteReport::tests).sum()
    }

    pub fn count(&self, status: TestStatus) -> usize {
        self.records().filter(|r| r.status == status).count()
    }

    pub fn all_passed(&self) -> bool {
        self.records().all(|r| r.status != TestStatus::Failed)
    }
}

fn status_tag(status: TestStatus) -> &'static str {
    match status {
        TestStatus::Passed => "[  PASSED  ]",
        TestStatus::Failed => "[  FAILED  ]",
        TestStatus::Skipped => "[  SKIPPED ]",
    }
}

/// Plain-text report: one line per test, the first failure of every failed
/// test, then `N tests, P passed, F failed`.
pub fn render_console(report: &RunReport) -> String {
    let mut out = String::new();
    for r in report.records() {
        let _ = writeln!(
            out,
            "{} {} ({:.3} s)",
            status_tag(r.status),
            r.id,
            r.duration_seconds
        );
    }
    let failed: Vec<&TestRecord> = report
        .records()
        .filter(|r| r.status == TestStatus::Failed)
        .collect();
    if !failed.is_empty() {
        out.push_str("Failed tests:\n");
        for r in failed {
            let first = &r.failures[0];
            let _ = writeln!(out, "  {}: {} [{}]", r.id, first.message, first.location);
        }
    }
    let _ = write!(
        out,
        "{} tests, {} passed, {} failed",
        report.tests(),
        report.count(TestStatus::Passed),
        report.count(TestStatus::Failed)
    );
    let skipped = report.count(TestStatus::Skipped);
    if skipped > 0 {
        let _ = write!(out, ", {skipped} skipped");
    }
    out.push('\n');
    out
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..='\u{10FFFF}')
}

/// Escapes for attribute values (quotes and whitespace controls included).
/// Characters XML cannot carry at all become U+FFFD.
pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c if !is_xml_char(c) => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c if !is_xml_char(c) => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

/// JUnit-compatible XML. Counts at every level are recomputed from the
/// records, so they always agree with the emitted elements.
pub fn render_junit_xml(report: &RunReport) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let failures: usize = report.suites().iter().map(SuiteReport::failures).sum();
    let _ = write!(
        out,
        "<testsuites tests=\"{}\" failures=\"{failures}\" disabled=\"0\" errors=\"0\" time=\"{:.3}\" timestamp=\"{}\" name=\"AllTests\"",
        report.tests(),
        report.total_duration_seconds,
        report.started_at.to_rfc3339_opts(SecondsFormat::Millis, true),
    );
    if report.suites().is_empty() {
        out.push_str("/>\n");
        return out;
    }
    out.push_str(">\n");
    for suite in report.suites() {
        let _ = writeln!(
            out,
            "  <testsuite name=\"{}\" tests=\"{}\" failures=\"{}\" disabled=\"0\" errors=\"0\" time=\"{:.3}\">",
            escape_attr(&suite.name),
            suite.tests(),
            suite.failures(),
            suite.time()
        );
        for r in &suite.records {
            let status = if r.status == TestStatus::Skipped {
                "notrun"
            } else {
                "run"
            };
            let _ = write!(
                out,
                "    <testcase name=\"{}\" classname=\"{}\" time=\"{:.3}\" status=\"{status}\"",
                escape_attr(r.id.name()),
                escape_attr(&suite.name),
                r.duration_seconds,
            );
            if r.failures.is_empty() && r.skip_reason.is_none() {
                out.push_str("/>\n");
                continue;
            }
            out.push_str(">\n");
            for f in &r.failures {
                let _ = writeln!(
                    out,
                    "      <failure message=\"{}\" type=\"{}\">{}</failure>",
                    escape_attr(&f.message),
                    f.severity,
                    escape_text(&format!("{}\n{}", f.location, f.message)),
                );
            }
            if let Some(reason) = &r.skip_reason {
                if r.failures.is_empty() {
                    let _ = writeln!(out, "      <skipped message=\"{}\"/>", escape_attr(reason));
                }
            }
            out.push_str("    </testcase>\n");
        }
        out.push_str("  </testsuite>\n");
    }
    out.push_str("</testsuites>\n");
    out
}
