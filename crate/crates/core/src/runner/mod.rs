//! Orchestration: selection, execution order, reporting and the CLI.

mod cli;
mod filter;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use chrono::Utc;

pub use cli::{cli_main, cli_run, EXIT_BAD_FLAGS, EXIT_FAILED, EXIT_OK};
pub use filter::{filter_matches, glob_match, parse_filter, FilterSpec};
pub use report::{
    escape_attr, escape_text, render_console, render_junit_xml, RunReport, SuiteReport,
};

use crate::xunit::{execute_test, TestDefinition, TestRegistry};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub filter: FilterSpec,
    pub xml_output_path: Option<PathBuf>,
    pub list_only: bool,
}

/// Tests passing the filter, death suites first, otherwise in registration
/// order.
pub fn select<'r>(registry: &'r TestRegistry, filter: &FilterSpec) -> Vec<&'r TestDefinition> {
    let (death, rest): (Vec<&TestDefinition>, Vec<&TestDefinition>) = registry
        .tests()
        .iter()
        .filter(|d| filter.matches(d.id()))
        .partition(|d| d.id().is_death_suite());
    death.into_iter().chain(rest).collect()
}

/// Executes the selected tests one after another. Nothing runs when
/// `list_only` is set.
pub fn run(registry: &TestRegistry, config: &RunConfig) -> RunReport {
    run_with(registry, config, |_| {})
}

/// Like [`run`], calling `on_record` after every test.
pub fn run_with(
    registry: &TestRegistry,
    config: &RunConfig,
    mut on_record: impl FnMut(&crate::xunit::TestRecord),
) -> RunReport {
    let mut report = RunReport::new(Utc::now());
    if config.list_only {
        return report;
    }
    let start = Instant::now();
    for def in select(registry, &config.filter) {
        let record = execute_test(def);
        on_record(&record);
        report.push(record);
    }
    report.total_duration_seconds = start.elapsed().as_secs_f64();
    report
}
